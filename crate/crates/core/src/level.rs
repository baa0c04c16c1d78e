//! Probability levels that carry their complement.
//!
//! Almost every quantity in this crate is evaluated both at `p` and at `1 - p`
//! (duals, survival probabilities, reflections). Recomputing `1 - (1 - p)` in
//! binary floating point does not return `p` for `p < 1/2`, so a [`Level`]
//! stores both numbers and [`Level::flip`] just swaps them. That keeps duality
//! and reflection exact involutions.

use serde::{Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;

/// A point of `[0, 1]` together with its complement.
#[derive(Clone, Copy, Debug)]
pub struct Level {
    p: f64,
    q: f64,
}

impl Level {
    pub const ZERO: Level = Level { p: 0.0, q: 1.0 };
    pub const ONE: Level = Level { p: 1.0, q: 0.0 };
    pub const HALF: Level = Level { p: 0.5, q: 0.5 };

    /// Level at `p`; the complement is computed once.
    pub fn new(p: f64) -> Level {
        Level { p, q: 1.0 - p }
    }

    /// Level at `1 - q` where `q` is known exactly.
    pub fn complement_of(q: f64) -> Level {
        Level { p: 1.0 - q, q }
    }

    /// Level at `i / n`, with both the value and the complement correctly rounded.
    pub fn from_ratio(i: usize, n: usize) -> Level {
        debug_assert!(i <= n && n > 0);
        Level {
            p: i as f64 / n as f64,
            q: (n - i) as f64 / n as f64,
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.p
    }

    #[inline]
    pub fn complement(self) -> f64 {
        self.q
    }

    /// `1 - self`, exactly.
    #[inline]
    pub fn flip(self) -> Level {
        Level { p: self.q, q: self.p }
    }

    pub fn is_unit(self) -> bool {
        self.p.is_finite() && (0.0..=1.0).contains(&self.p)
    }

    /// Width of `[self, other]`, taking whichever difference is better conditioned.
    pub fn width_to(self, other: Level) -> f64 {
        if self.p < 0.5 {
            other.p - self.p
        } else {
            self.q - other.q
        }
    }
}

impl PartialEq for Level {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
    }
}

impl PartialOrd for Level {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.p.partial_cmp(&other.p)
    }
}

impl From<f64> for Level {
    fn from(p: f64) -> Self {
        Level::new(p)
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.p)
    }
}

impl Serialize for Level {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flip_is_exact_involution() {
        for p in [0.1, 0.05, 0.3, 0.95, 1e-9, 0.5] {
            let l = Level::new(p);
            assert_eq!(l.flip().flip().value(), p);
            assert_eq!(l.flip().complement(), p);
        }
        // The naive route is not exact.
        assert_ne!(1.0 - (1.0 - 0.1), 0.1);
    }

    #[test]
    fn width_matches_difference() {
        let a = Level::new(0.95);
        assert_eq!(a.width_to(Level::ONE), a.complement());
        let b = Level::new(0.2);
        assert!((b.width_to(Level::new(0.7)) - 0.5).abs() < 1e-15);
    }
}
