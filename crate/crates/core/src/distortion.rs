//! Piecewise-linear distortion functions.
//!
//! A [`Distortion`] is a nondecreasing map of `[0, 1]` onto itself with
//! `h(0) = 0` and `h(1) = 1`, stored as a list of knots. A knot carries a left
//! and a right value so that jumps are represented exactly; between knots the
//! function is linear. Every jump of a distortion takes the same side as its
//! actual value ([`Distortion::jump_value`]). GlueVaR distortions take the right
//! value, their duals the left one.

use crate::hull::{lower_hull, upper_hull};
use crate::level::Level;
use crate::step::StepFunction;
use serde::Serialize;
use std::fmt;
use thiserror::Error;

/// Absolute tolerance used when comparing slopes and case thresholds.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistortionError {
    #[error("invalid GlueVaR parameters: {0}")]
    InvalidParams(String),
    #[error("rvar needs both alpha and beta")]
    MissingBeta,
    #[error("invalid breakpoints: {0}")]
    InvalidBreakpoints(String),
    #[error("function has a jump at p = {0} and is not differentiable there")]
    NotDifferentiable(f64),
    #[error("probability {0} lies outside [0, 1]")]
    OutOfRange(f64),
    #[error("mixture weights are undefined when alpha = beta")]
    DegenerateWeights,
}

/// Which one-sided limit a function takes at a jump.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// A breakpoint with its left and right limits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Knot {
    pub at: Level,
    pub left: Level,
    pub right: Level,
}

impl Knot {
    fn continuous(at: Level, value: Level) -> Knot {
        Knot {
            at,
            left: value,
            right: value,
        }
    }

    pub fn is_jump(&self) -> bool {
        self.left != self.right
    }

    pub fn side(&self, side: Side) -> Level {
        match side {
            Side::Left => self.left,
            Side::Right => self.right,
        }
    }
}

/// Piecewise-linear distortion function, possibly with jumps in `(0, 1)`.
#[derive(Clone, Debug)]
pub struct Distortion {
    knots: Vec<Knot>,
    jump_value: Side,
}

impl PartialEq for Distortion {
    fn eq(&self, other: &Self) -> bool {
        self.knots == other.knots && (self.jump_value == other.jump_value || !self.has_jumps())
    }
}

impl Distortion {
    /// Builds a distortion from `(p, v)` pairs. A jump is written as two
    /// consecutive pairs sharing `p` (left value first).
    pub fn from_breakpoints(points: &[(f64, f64)], jump_value: Side) -> Result<Distortion, DistortionError> {
        let bad = |m: &str| Err(DistortionError::InvalidBreakpoints(m.to_string()));
        if points.len() < 2 {
            return bad("need at least two points");
        }
        if points.iter().any(|&(p, v)| !p.is_finite() || !v.is_finite()) {
            return bad("non-finite coordinate");
        }
        if points[0] != (0.0, 0.0) || *points.last().unwrap() != (1.0, 1.0) {
            return bad("must start at (0,0) and end at (1,1)");
        }
        let mut knots: Vec<Knot> = Vec::new();
        for (i, &(p, v)) in points.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return bad("values must lie in [0,1]");
            }
            if i > 0 {
                let (pp, pv) = points[i - 1];
                if p < pp {
                    return bad("p must be nondecreasing");
                }
                if v < pv {
                    return bad("values must be nondecreasing");
                }
            }
            match knots.last_mut() {
                Some(k) if k.at.value() == p => {
                    if k.left != k.right {
                        return bad("at most two points may share a p");
                    }
                    if p == 0.0 || p == 1.0 {
                        if v != k.right.value() {
                            return bad("jumps are only allowed inside (0,1)");
                        }
                        continue;
                    }
                    k.right = Level::new(v);
                }
                _ => knots.push(Knot::continuous(Level::new(p), Level::new(v))),
            }
        }
        Ok(Distortion { knots, jump_value })
    }

    /// `h(p) = p`.
    pub fn identity() -> Distortion {
        Distortion {
            knots: vec![
                Knot::continuous(Level::ZERO, Level::ZERO),
                Knot::continuous(Level::ONE, Level::ONE),
            ],
            jump_value: Side::Right,
        }
    }

    /// The GlueVaR distortion with slope `k2` on `[0, 1-β)`, slope `k1` on
    /// `[1-β, 1-α)` and value 1 on `[1-α, 1]`.
    pub fn gluevar(params: &GlueVaRParams) -> Distortion {
        let b = Level::complement_of(params.beta);
        let a = Level::complement_of(params.alpha);
        let h1 = Level::new(params.h1);
        let h2 = Level::new(params.h2);
        let mut knots = vec![Knot::continuous(Level::ZERO, Level::ZERO)];
        if b < a {
            knots.push(Knot::continuous(b, h1));
        }
        knots.push(Knot {
            at: a,
            left: h2,
            right: Level::ONE,
        });
        knots.push(Knot::continuous(Level::ONE, Level::ONE));
        Distortion {
            knots,
            jump_value: Side::Right,
        }
    }

    /// VaR, TVaR or RVaR as members of the GlueVaR family.
    pub fn special(kind: SpecialKind, alpha: f64, beta: Option<f64>) -> Result<Distortion, DistortionError> {
        Ok(Distortion::gluevar(&GlueVaRParams::special(kind, alpha, beta)?))
    }

    pub fn knots(&self) -> &[Knot] {
        &self.knots
    }

    pub fn jump_value(&self) -> Side {
        self.jump_value
    }

    /// Same knots, jumps taking the other one-sided limit.
    pub fn with_jump_side(&self, side: Side) -> Distortion {
        Distortion {
            knots: self.knots.clone(),
            jump_value: side,
        }
    }

    pub fn has_jumps(&self) -> bool {
        self.knots.iter().any(Knot::is_jump)
    }

    /// Locations of the jumps.
    pub fn jumps(&self) -> impl Iterator<Item = Level> + '_ {
        self.knots.iter().filter(|k| k.is_jump()).map(|k| k.at)
    }

    /// `(p, v)` pairs with a doubled entry at each jump.
    pub fn breakpoints(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.knots.len() + 2);
        for k in &self.knots {
            out.push((k.at.value(), k.left.value()));
            if k.is_jump() {
                out.push((k.at.value(), k.right.value()));
            }
        }
        out
    }

    /// `h̃(p) = 1 - h(1 - p)`.
    pub fn dual(&self) -> Distortion {
        let knots = self
            .knots
            .iter()
            .rev()
            .map(|k| Knot {
                at: k.at.flip(),
                left: k.right.flip(),
                right: k.left.flip(),
            })
            .collect();
        Distortion {
            knots,
            jump_value: self.jump_value.opposite(),
        }
    }

    /// Greatest convex minorant. Jumps contribute their left value.
    pub fn convex_envelope(&self) -> Distortion {
        let xs: Vec<f64> = self.knots.iter().map(|k| k.at.value()).collect();
        let ys: Vec<f64> = self.knots.iter().map(|k| k.left.value()).collect();
        self.hull_from(lower_hull(&xs, &ys), Side::Left)
    }

    /// Least concave majorant. Jumps contribute their right value.
    pub fn concave_envelope(&self) -> Distortion {
        let xs: Vec<f64> = self.knots.iter().map(|k| k.at.value()).collect();
        let ys: Vec<f64> = self.knots.iter().map(|k| k.right.value()).collect();
        self.hull_from(upper_hull(&xs, &ys), Side::Right)
    }

    fn hull_from(&self, idx: Vec<usize>, side: Side) -> Distortion {
        let knots = idx
            .into_iter()
            .map(|i| {
                let k = self.knots[i];
                Knot::continuous(k.at, k.side(side))
            })
            .collect();
        Distortion {
            knots,
            jump_value: self.jump_value,
        }
    }

    /// Right derivative of a continuous distortion.
    pub fn right_derivative(&self) -> Result<StepFunction, DistortionError> {
        if let Some(k) = self.knots.iter().find(|k| k.is_jump()) {
            return Err(DistortionError::NotDifferentiable(k.at.value()));
        }
        let n = self.knots.len() - 1;
        let mut starts = Vec::with_capacity(n);
        let mut slopes = Vec::with_capacity(n);
        for w in self.knots.windows(2) {
            let width = w[0].at.width_to(w[1].at);
            if width <= 0.0 {
                continue;
            }
            starts.push(w[0].at);
            slopes.push(w[0].right.width_to(w[1].left) / width);
        }
        Ok(StepFunction::new(starts, slopes))
    }

    /// Value at `x`, taking the `side` limit if `x` is a jump.
    pub fn eval_level(&self, x: Level, side: Side) -> f64 {
        let idx = self.knots.partition_point(|k| k.at <= x);
        let i = idx.saturating_sub(1);
        let k = &self.knots[i];
        if k.at == x || i + 1 == self.knots.len() {
            return k.side(side).value();
        }
        let next = &self.knots[i + 1];
        let width = k.at.width_to(next.at);
        let t = k.at.width_to(x);
        k.right.value() + k.right.width_to(next.left) * (t / width)
    }

    /// Value at `p`, taking the `side` limit if `p` is a jump. A `p` within
    /// a few ulps of a knot is read as that knot, so `0.05` hits the knot
    /// stored at `1 - 0.95`.
    pub fn eval(&self, p: f64, side: Side) -> Result<f64, DistortionError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(DistortionError::OutOfRange(p));
        }
        let x = self
            .knots
            .iter()
            .map(|k| k.at)
            .find(|k| (k.value() - p).abs() <= 4.0 * f64::EPSILON)
            .unwrap_or_else(|| Level::new(p));
        Ok(self.eval_level(x, side))
    }

    /// `h(hi) - h(lo)` for `lo <= hi`, computed from slopes and widths when
    /// both ends share a segment so that tiny increments keep full precision.
    pub fn increment(&self, lo: Level, hi: Level) -> f64 {
        if !(lo < hi) {
            return 0.0;
        }
        let i = self.knots.partition_point(|k| k.at <= lo).saturating_sub(1);
        if i + 1 >= self.knots.len() || hi > self.knots[i + 1].at {
            return self.value_at(hi) - self.value_at(lo);
        }
        let (k, next) = (&self.knots[i], &self.knots[i + 1]);
        let slope = k.right.width_to(next.left) / k.at.width_to(next.at);
        let mut inc = slope * lo.width_to(hi);
        if k.at == lo {
            inc += k.right.value() - self.value_at(lo);
        }
        if next.at == hi {
            inc += self.value_at(hi) - next.left.value();
        }
        inc
    }

    /// Actual value `h(x)`.
    pub fn value_at(&self, x: Level) -> f64 {
        self.eval_level(x, self.jump_value)
    }

    /// Shortest distance between two distinct knots.
    pub fn min_segment_width(&self) -> f64 {
        self.knots
            .windows(2)
            .map(|w| w[0].at.width_to(w[1].at))
            .fold(f64::INFINITY, f64::min)
    }
}

impl fmt::Display for Distortion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pts: Vec<String> = self
            .breakpoints()
            .iter()
            .map(|(p, v)| format!("({p},{v})"))
            .collect();
        write!(f, "{}", pts.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpecialKind {
    Var,
    Tvar,
    Rvar,
}

/// Parameters of a GlueVaR distortion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GlueVaRParams {
    pub alpha: f64,
    pub beta: f64,
    pub h1: f64,
    pub h2: f64,
}

/// Slopes of the three pieces of a GlueVaR distortion.
///
/// `k1` is `None` when `alpha == beta` and the middle piece is empty.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlopeTriple {
    pub k1: Option<f64>,
    pub k2: f64,
    pub k3: f64,
}

impl GlueVaRParams {
    pub fn new(alpha: f64, beta: f64, h1: f64, h2: f64) -> Result<GlueVaRParams, DistortionError> {
        let err = |m: String| Err(DistortionError::InvalidParams(m));
        for (name, v) in [("alpha", alpha), ("beta", beta), ("h1", h1), ("h2", h2)] {
            if !v.is_finite() {
                return err(format!("{name} is not finite"));
            }
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return err(format!("alpha = {alpha} must lie in (0,1)"));
        }
        if !(beta >= alpha && beta < 1.0) {
            return err(format!("beta = {beta} must lie in [alpha,1)"));
        }
        if !(0.0 <= h1 && h1 <= h2 && h2 <= 1.0) {
            return err(format!("need 0 <= h1 <= h2 <= 1, got h1 = {h1}, h2 = {h2}"));
        }
        if alpha == beta && h1 != h2 {
            return err("alpha = beta requires h1 = h2".to_string());
        }
        Ok(GlueVaRParams { alpha, beta, h1, h2 })
    }

    /// Parameters of VaR, TVaR or RVaR.
    pub fn special(kind: SpecialKind, alpha: f64, beta: Option<f64>) -> Result<GlueVaRParams, DistortionError> {
        match kind {
            SpecialKind::Var => GlueVaRParams::new(alpha, alpha, 0.0, 0.0),
            SpecialKind::Tvar => GlueVaRParams::new(alpha, alpha, 1.0, 1.0),
            SpecialKind::Rvar => {
                let beta = beta.ok_or(DistortionError::MissingBeta)?;
                if beta <= alpha {
                    return Err(DistortionError::InvalidParams(format!(
                        "rvar needs alpha < beta, got alpha = {alpha}, beta = {beta}"
                    )));
                }
                GlueVaRParams::new(alpha, beta, 0.0, 1.0)
            }
        }
    }

    pub fn slopes(&self) -> SlopeTriple {
        let k1 = if self.beta > self.alpha {
            Some((self.h2 - self.h1) / (self.beta - self.alpha))
        } else {
            None
        };
        SlopeTriple {
            k1,
            k2: self.h1 / (1.0 - self.beta),
            k3: (1.0 - self.h2) / self.alpha,
        }
    }

    /// Weights of `TVaR_β`, `TVaR_α` and `VaR_α` in the mixture representation.
    pub fn mixture_weights(&self) -> Result<[f64; 3], DistortionError> {
        if self.beta <= self.alpha {
            return Err(DistortionError::DegenerateWeights);
        }
        let (a, b, h1, h2) = (self.alpha, self.beta, self.h1, self.h2);
        let w1 = h1 - (h2 - h1) * (1.0 - b) / (b - a);
        let w2 = (h2 - h1) * (1.0 - a) / (b - a);
        Ok([w1, w2, 1.0 - h2])
    }

    pub fn distortion(&self) -> Distortion {
        Distortion::gluevar(self)
    }
}
