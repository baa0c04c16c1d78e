//! Choquet integrals of finitely supported distributions.

use crate::distortion::{Distortion, DistortionError, GlueVaRParams, SpecialKind};
use crate::level::Level;
use crate::step::StepFunction;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantileError {
    #[error("quantile needs at least one atom")]
    Empty,
    #[error("levels and values differ in length")]
    LengthMismatch,
    #[error("cumulative levels must increase strictly to 1")]
    BadLevels,
    #[error("values must be finite and nondecreasing")]
    BadValues,
    #[error("invalid moment spec: {0}")]
    BadSpec(String),
}

/// Distribution class of the ambiguity set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DistClass {
    General,
    Symmetric,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentSpec {
    pub mu: f64,
    pub sigma: f64,
    pub class: DistClass,
}

impl MomentSpec {
    pub fn new(mu: f64, sigma: f64, class: DistClass) -> Result<MomentSpec, QuantileError> {
        if !mu.is_finite() || !sigma.is_finite() {
            return Err(QuantileError::BadSpec("mu and sigma must be finite".into()));
        }
        if sigma < 0.0 {
            return Err(QuantileError::BadSpec(format!("sigma = {sigma} is negative")));
        }
        Ok(MomentSpec { mu, sigma, class })
    }

    pub fn general(mu: f64, sigma: f64) -> Result<MomentSpec, QuantileError> {
        MomentSpec::new(mu, sigma, DistClass::General)
    }

    pub fn symmetric(mu: f64, sigma: f64) -> Result<MomentSpec, QuantileError> {
        MomentSpec::new(mu, sigma, DistClass::Symmetric)
    }

    pub fn with_class(self, class: DistClass) -> MomentSpec {
        MomentSpec { class, ..self }
    }
}

/// Right-continuous quantile function of a finitely supported distribution.
///
/// Atom `i` has value `values[i]` on `[levels[i-1], levels[i])` with an
/// implicit `levels[-1] = 0`; the last level is 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepQuantile {
    levels: Vec<Level>,
    values: Vec<f64>,
}

impl StepQuantile {
    pub fn new(levels: Vec<Level>, values: Vec<f64>) -> Result<StepQuantile, QuantileError> {
        if levels.is_empty() {
            return Err(QuantileError::Empty);
        }
        if levels.len() != values.len() {
            return Err(QuantileError::LengthMismatch);
        }
        let mut prev = Level::ZERO;
        for &l in &levels {
            if !(l > prev) || !l.is_unit() {
                return Err(QuantileError::BadLevels);
            }
            prev = l;
        }
        if prev != Level::ONE {
            return Err(QuantileError::BadLevels);
        }
        if values.iter().any(|v| !v.is_finite()) || values.windows(2).any(|w| w[0] > w[1]) {
            return Err(QuantileError::BadValues);
        }
        Ok(StepQuantile { levels, values })
    }

    /// `(cumulative probability, value)` pairs as plain numbers.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<StepQuantile, QuantileError> {
        let mut levels: Vec<Level> = pairs.iter().map(|&(q, _)| Level::new(q)).collect();
        if let Some(last) = levels.last_mut() {
            if last.value() == 1.0 {
                *last = Level::ONE;
            }
        }
        StepQuantile::new(levels, pairs.iter().map(|&(_, x)| x).collect())
    }

    /// Point mass at `x`.
    pub fn degenerate(x: f64) -> StepQuantile {
        StepQuantile {
            levels: vec![Level::ONE],
            values: vec![x],
        }
    }

    /// `x ↦ shift + scale·f(x)` for a nondecreasing step function `f`.
    pub fn from_step(f: &StepFunction, shift: f64, scale: f64) -> StepQuantile {
        debug_assert!(scale >= 0.0);
        let n = f.len();
        let levels = (0..n).map(|i| f.end(i)).collect();
        let values = f.values().iter().map(|&v| shift + scale * v).collect();
        StepQuantile { levels, values }
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Lower end of atom `i`.
    pub fn start(&self, i: usize) -> Level {
        if i == 0 {
            Level::ZERO
        } else {
            self.levels[i - 1]
        }
    }

    /// Probability of atom `i`.
    pub fn mass(&self, i: usize) -> f64 {
        let (lo, hi) = (self.start(i), self.levels[i]);
        if hi.value() > 0.5 {
            lo.complement() - hi.complement()
        } else {
            hi.value() - lo.value()
        }
    }

    /// `(cumulative probability, value)` pairs.
    pub fn pairs(&self) -> Vec<(f64, f64)> {
        self.levels.iter().map(|l| l.value()).zip(self.values.iter().copied()).collect()
    }

    /// Right-continuous quantile at `u`.
    pub fn quantile(&self, u: f64) -> f64 {
        let i = self.levels.partition_point(|l| l.value() <= u);
        self.values[i.min(self.len() - 1)]
    }

    /// Left-continuous quantile at `u`.
    pub fn quantile_left(&self, u: f64) -> f64 {
        let i = self.levels.partition_point(|l| l.value() < u);
        self.values[i.min(self.len() - 1)]
    }

    /// Affine image `a + b·X`, `b ≥ 0`.
    pub fn affine(&self, a: f64, b: f64) -> StepQuantile {
        debug_assert!(b >= 0.0);
        StepQuantile {
            levels: self.levels.clone(),
            values: self.values.iter().map(|&x| a + b * x).collect(),
        }
    }

    /// Rescaled to exact mean `mu` and standard deviation `sigma`. `None` if
    /// the distribution is degenerate.
    pub fn standardized(&self, mu: f64, sigma: f64) -> Option<StepQuantile> {
        let (m, v) = moments(self);
        if !(v > 0.0) {
            return None;
        }
        let s = v.sqrt();
        Some(StepQuantile {
            levels: self.levels.clone(),
            values: self.values.iter().map(|&x| mu + sigma * ((x - m) / s)).collect(),
        })
    }
}

/// `ρ_h[X] = Σ x_i [h(1 - q_{i-1}) - h(1 - q_i)]` with `h` taking its actual values.
pub fn choquet_eval(d: &Distortion, q: &StepQuantile) -> f64 {
    let mut acc = 0.0;
    for (i, &x) in q.values.iter().enumerate() {
        acc += x * d.increment(q.levels[i].flip(), q.start(i).flip());
    }
    acc
}

/// Mean and variance.
pub fn moments(q: &StepQuantile) -> (f64, f64) {
    let mean: f64 = (0..q.len()).map(|i| q.values[i] * q.mass(i)).sum();
    let var: f64 = (0..q.len())
        .map(|i| {
            let d = q.values[i] - mean;
            d * d * q.mass(i)
        })
        .sum();
    (mean, var)
}

/// Whether `F^{-1+}(u) + F^{-1}(1-u) = 2·mean` at every mass point.
pub fn is_symmetric(q: &StepQuantile, tol: f64) -> bool {
    let (mean, _) = moments(q);
    let mut cuts: Vec<f64> = q
        .levels
        .iter()
        .flat_map(|l| [l.value(), l.complement()])
        .chain([0.0, 1.0])
        .collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    cuts.windows(2).all(|w| {
        let u = 0.5 * (w[0] + w[1]);
        (q.quantile(u) + q.quantile_left(1.0 - u) - 2.0 * mean).abs() <= tol
    })
}

/// `ω1·TVaR_β + ω2·TVaR_α + ω3·VaR_α`.
pub fn gluevar_mixture_eval(params: &GlueVaRParams, q: &StepQuantile) -> Result<f64, DistortionError> {
    let [w1, w2, w3] = params.mixture_weights()?;
    let tvar_b = Distortion::special(SpecialKind::Tvar, params.beta, None)?;
    let tvar_a = Distortion::special(SpecialKind::Tvar, params.alpha, None)?;
    let var_a = Distortion::special(SpecialKind::Var, params.alpha, None)?;
    Ok(w1 * choquet_eval(&tvar_b, q) + w2 * choquet_eval(&tvar_a, q) + w3 * choquet_eval(&var_a, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn two_point() -> StepQuantile {
        StepQuantile::from_pairs(&[(0.9, -1.0 / 3.0), (1.0, 3.0)]).unwrap()
    }

    fn coin() -> StepQuantile {
        StepQuantile::from_pairs(&[(0.5, -1.0), (1.0, 1.0)]).unwrap()
    }

    #[test]
    fn degenerate_has_distortion_independent_value() {
        let q = StepQuantile::degenerate(5.0);
        for d in [
            Distortion::identity(),
            GlueVaRParams::new(0.95, 0.99, 0.3, 0.8).unwrap().distortion(),
        ] {
            assert_eq!(choquet_eval(&d, &q), 5.0);
        }
        assert_eq!(moments(&q), (5.0, 0.0));
        assert!(is_symmetric(&q, 0.0));
    }

    #[test]
    fn var_takes_upper_quantile_at_its_level() {
        let var = Distortion::special(SpecialKind::Var, 0.9, None).unwrap();
        assert_eq!(choquet_eval(&var, &two_point()), 3.0);
    }

    #[test]
    fn tvar_of_coin() {
        let tvar = Distortion::special(SpecialKind::Tvar, 0.5, None).unwrap();
        assert_eq!(choquet_eval(&tvar, &coin()), 1.0);
    }

    #[test]
    fn moments_examples() {
        assert_eq!(moments(&coin()), (0.0, 1.0));
        let (m, v) = moments(&two_point());
        assert!(m.abs() < 1e-15 && (v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn symmetry_examples() {
        assert!(is_symmetric(&coin(), 1e-12));
        assert!(!is_symmetric(&two_point(), 1e-12));
        let three = StepQuantile::from_pairs(&[(0.1, -2.0), (0.9, 0.0), (1.0, 2.0)]).unwrap();
        assert!(is_symmetric(&three, 1e-12));
        let skew = StepQuantile::from_pairs(&[(0.1, -2.0), (0.8, 0.0), (1.0, 2.0)]).unwrap();
        assert!(!is_symmetric(&skew, 1e-9));
    }

    #[test]
    fn mixture_matches_direct_on_two_point() {
        let p = GlueVaRParams::new(0.9, 0.95, 0.02, 0.6).unwrap();
        let q = two_point();
        let direct = choquet_eval(&p.distortion(), &q);
        let mix = gluevar_mixture_eval(&p, &q).unwrap();
        assert!((direct - mix).abs() < 1e-12);
        let deg = StepQuantile::degenerate(2.5);
        assert!((gluevar_mixture_eval(&p, &deg).unwrap() - 2.5).abs() < 1e-12);
        let var = GlueVaRParams::new(0.9, 0.9, 0.0, 0.0).unwrap();
        assert_eq!(gluevar_mixture_eval(&var, &q), Err(DistortionError::DegenerateWeights));
    }

    #[test]
    fn rejects_malformed_quantiles() {
        assert!(StepQuantile::from_pairs(&[(0.5, 1.0), (0.9, 2.0)]).is_err());
        assert!(StepQuantile::from_pairs(&[(0.5, 1.0), (0.5, 2.0), (1.0, 3.0)]).is_err());
        assert!(StepQuantile::from_pairs(&[(0.5, 2.0), (1.0, 1.0)]).is_err());
        assert!(StepQuantile::from_pairs(&[]).is_err());
    }

    fn quantile() -> impl Strategy<Value = StepQuantile> {
        proptest::collection::vec((0.01f64..1.0, -10.0f64..10.0), 1..8).prop_map(|atoms| {
            let total: f64 = atoms.iter().map(|a| a.0).sum();
            let mut values: Vec<f64> = atoms.iter().map(|a| a.1).collect();
            values.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut acc = 0.0;
            let mut levels: Vec<Level> = atoms
                .iter()
                .map(|a| {
                    acc += a.0;
                    Level::new(acc / total)
                })
                .collect();
            *levels.last_mut().unwrap() = Level::ONE;
            StepQuantile::new(levels, values).unwrap()
        })
    }

    proptest! {
        #[test]
        fn identity_gives_mean_exactly(q in quantile()) {
            prop_assert_eq!(choquet_eval(&Distortion::identity(), &q), moments(&q).0);
        }

        #[test]
        fn translation_and_scaling(q in quantile(), c in -5.0f64..5.0, l in 0.1f64..10.0) {
            let d = GlueVaRParams::new(0.7, 0.9, 0.2, 0.5).unwrap().distortion();
            let base = choquet_eval(&d, &q);
            let scale = 1.0 + base.abs() + c.abs();
            prop_assert!((choquet_eval(&d, &q.affine(c, 1.0)) - (base + c)).abs() < 1e-12 * scale * 10.0);
            prop_assert!((choquet_eval(&d, &q.affine(0.0, l)) - l * base).abs() < 1e-12 * scale * l * 10.0);
        }

        #[test]
        fn monotone_in_quantile(q in quantile(), bump in 0.0f64..3.0) {
            let d = GlueVaRParams::new(0.6, 0.8, 0.1, 0.7).unwrap().distortion();
            let shifted = q.affine(bump, 1.0);
            prop_assert!(choquet_eval(&d, &shifted) >= choquet_eval(&d, &q) - 1e-12);
        }
    }
}
