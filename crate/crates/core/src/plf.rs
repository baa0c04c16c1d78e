//! Piecewise-linear functions on `[0, 1]` with jumps, built as linear
//! combinations of distortions.

use crate::distortion::{Distortion, Side};
use crate::hull::lower_hull;
use crate::level::Level;
use crate::step::StepFunction;

#[derive(Clone, Debug)]
pub struct Plf {
    at: Vec<Level>,
    left: Vec<f64>,
    right: Vec<f64>,
    actual: Vec<f64>,
}

impl Plf {
    /// `Σ c_j d_j`, with breakpoints at the union of the inputs' knots.
    pub fn combine(terms: &[(f64, &Distortion)]) -> Plf {
        let mut at: Vec<Level> = terms
            .iter()
            .flat_map(|(_, d)| d.knots().iter().map(|k| k.at))
            .collect();
        at.sort_by(|a, b| a.partial_cmp(b).unwrap());
        at.dedup_by(|a, b| a == b);
        let sum = |x: Level, side: Option<Side>| -> f64 {
            terms
                .iter()
                .map(|(c, d)| c * side.map_or_else(|| d.value_at(x), |s| d.eval_level(x, s)))
                .sum()
        };
        let left = at.iter().map(|&x| sum(x, Some(Side::Left))).collect();
        let right = at.iter().map(|&x| sum(x, Some(Side::Right))).collect();
        let actual = at.iter().map(|&x| sum(x, None)).collect();
        Plf { at, left, right, actual }
    }

    pub fn levels(&self) -> &[Level] {
        &self.at
    }

    /// `max |f|` over breakpoints and one-sided limits.
    pub fn sup_norm(&self) -> f64 {
        self.left
            .iter()
            .chain(&self.right)
            .chain(&self.actual)
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Interior points where the function vanishes: midpoints of segments on
    /// which it is identically zero, then breakpoints where the function or
    /// one of its limits is within `tol` of zero.
    pub fn near_zeros(&self, tol: f64) -> Vec<Level> {
        let n = self.at.len();
        let mut out = Vec::new();
        for i in 0..n.saturating_sub(1) {
            if self.right[i].abs() <= tol && self.left[i + 1].abs() <= tol {
                out.push(Level::new(0.5 * (self.at[i].value() + self.at[i + 1].value())));
            }
        }
        for i in 0..n {
            let x = self.at[i].value();
            if x > 0.0
                && x < 1.0
                && (self.left[i].abs() <= tol || self.right[i].abs() <= tol || self.actual[i].abs() <= tol)
            {
                out.push(self.at[i]);
            }
        }
        out
    }

    /// Right derivative of the greatest convex minorant of the lower
    /// semicontinuous version of the function.
    pub fn convex_minorant_slope(&self) -> StepFunction {
        let xs: Vec<f64> = self.at.iter().map(|l| l.value()).collect();
        let ys: Vec<f64> = (0..self.at.len())
            .map(|i| self.left[i].min(self.right[i]).min(self.actual[i]))
            .collect();
        let idx = lower_hull(&xs, &ys);
        let mut starts = Vec::with_capacity(idx.len());
        let mut slopes = Vec::with_capacity(idx.len());
        for w in idx.windows(2) {
            let width = self.at[w[0]].width_to(self.at[w[1]]);
            starts.push(self.at[w[0]]);
            slopes.push((ys[w[1]] - ys[w[0]]) / width);
        }
        if starts.is_empty() {
            return StepFunction::constant(0.0);
        }
        StepFunction::new(starts, slopes)
    }

    /// [`Plf::convex_minorant_slope`] for a function with `f(p) = f(1-p)`.
    /// The hull is taken on `[0, 1/2]` and mirrored, so the result satisfies
    /// `D(p) = -D(1-p)` level for level.
    pub fn symmetric_minorant_slope(&self) -> StepFunction {
        let mut pts: Vec<(Level, f64)> = Vec::with_capacity(self.at.len() + 1);
        for i in 0..self.at.len() {
            let x = self.at[i];
            if x > Level::HALF {
                let (x0, y0) = (self.at[i - 1], self.right[i - 1]);
                if x0 < Level::HALF {
                    let t = x0.width_to(Level::HALF) / x0.width_to(x);
                    pts.push((Level::HALF, y0 + t * (self.left[i] - y0)));
                }
                break;
            }
            pts.push((x, self.left[i].min(self.right[i]).min(self.actual[i])));
        }
        let xs: Vec<f64> = pts.iter().map(|p| p.0.value()).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let idx = lower_hull(&xs, &ys);
        let mut starts = Vec::with_capacity(2 * idx.len());
        let mut slopes = Vec::with_capacity(2 * idx.len());
        for w in idx.windows(2) {
            starts.push(pts[w[0]].0);
            // past the minimum the mirrored hull is flat
            slopes.push(((ys[w[1]] - ys[w[0]]) / pts[w[0]].0.width_to(pts[w[1]].0)).min(0.0));
        }
        if starts.is_empty() {
            return StepFunction::constant(0.0);
        }
        let ends: Vec<Level> = idx[1..].iter().map(|&i| pts[i].0).collect();
        for j in (0..ends.len()).rev() {
            starts.push(ends[j].flip());
            slopes.push(-slopes[j]);
        }
        StepFunction::new(starts, slopes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distortion::GlueVaRParams;

    #[test]
    fn identity_minus_identity_is_zero() {
        let id = Distortion::identity();
        let f = Plf::combine(&[(1.0, &id), (-1.0, &id)]);
        assert_eq!(f.sup_norm(), 0.0);
        assert_eq!(f.convex_minorant_slope().values(), &[0.0]);
    }

    #[test]
    fn half_difference_of_var_and_its_dual() {
        // VaR at 0.3: h jumps at 0.7, its dual at 0.3
        let d = GlueVaRParams::new(0.3, 0.3, 0.0, 0.0).unwrap().distortion();
        let dual = d.dual();
        let chi = Plf::combine(&[(0.5, &d), (-0.5, &dual)]);
        // chi is 0 on [0,0.3), -1/2 on (0.3,0.7), 0 after, with its lsc minimum -1/2 at both jumps
        let s = chi.convex_minorant_slope();
        assert_eq!(s.len(), 3);
        assert!((s.values()[0] + 0.5 / 0.3).abs() < 1e-12);
        assert_eq!(s.values()[1], 0.0);
        assert!((s.values()[2] - 0.5 / 0.3).abs() < 1e-12);
        assert_eq!(chi.near_zeros(1e-12).len(), 4);
    }

    #[test]
    fn mirrored_minorant_matches_full_hull() {
        for (a, b, h1, h2) in [(0.2, 0.4, 0.3, 0.5), (0.6, 0.9, 0.05, 0.85), (0.95, 0.99, 0.3, 0.8), (0.3, 0.7, 0.2, 0.6)] {
            let d = GlueVaRParams::new(a, b, h1, h2).unwrap().distortion();
            let dual = d.dual();
            for sign in [0.5, -0.5] {
                let chi = Plf::combine(&[(sign, &dual), (-sign, &d)]);
                let full = chi.convex_minorant_slope();
                let half = chi.symmetric_minorant_slope();
                for i in 0..1000 {
                    let x = Level::from_ratio(2 * i + 1, 2000);
                    assert!((full.eval(x.value()) - half.eval(x.value())).abs() < 1e-9, "{a} {b} at {x}");
                    assert_eq!(half.eval(x.value()), -half.eval(x.flip().value()));
                }
            }
        }
    }
}
