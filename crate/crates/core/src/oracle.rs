//! Brute-force checks that do not go through envelopes.
//!
//! The risk measure of a distribution with `n` equally likely atoms
//! `x_1 <= ... <= x_n` is `Σ (w_i / n) x_i`, where `w_i` are the increments of
//! the dual distortion over `[(i-1)/n, i/n]`. Maximizing that over sorted
//! vectors with fixed mean and variance is a projection onto the monotone
//! cone, which the pool-adjacent-violators algorithm solves exactly.

use crate::bounds::{self, BoundError, Direction};
use crate::choquet::{choquet_eval, is_symmetric, moments, DistClass, MomentSpec, StepQuantile};
use crate::distortion::{Distortion, GlueVaRParams};
use crate::level::Level;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("need at least {min} atoms, got {got}")]
    TooFewAtoms { min: usize, got: usize },
    #[error("invalid moment spec: {0}")]
    InvalidSpec(String),
    #[error("could not draw a non-degenerate distribution after {0} attempts")]
    Degenerate(usize),
}

/// Least-squares projection onto nondecreasing sequences.
pub fn pava(w: &[f64]) -> Vec<f64> {
    // blocks of (sum, count)
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(w.len());
    for &x in w {
        blocks.push((x, 1));
        while blocks.len() >= 2 {
            let (s2, c2) = blocks[blocks.len() - 1];
            let (s1, c1) = blocks[blocks.len() - 2];
            if s1 / c1 as f64 > s2 / c2 as f64 {
                blocks.pop();
                *blocks.last_mut().unwrap() = (s1 + s2, c1 + c2);
            } else {
                break;
            }
        }
    }
    let mut out = Vec::with_capacity(w.len());
    for (s, c) in blocks {
        let m = s / c as f64;
        out.extend(std::iter::repeat_n(m, c));
    }
    out
}

fn shortest_gap(d: &Distortion, class: DistClass) -> f64 {
    let mut xs: Vec<f64> = d
        .knots()
        .iter()
        .chain(d.dual().knots())
        .map(|k| k.at.value())
        .collect();
    if class == DistClass::Symmetric {
        xs.push(0.5);
    }
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup();
    xs.windows(2).map(|w| w[1] - w[0]).fold(1.0, f64::min)
}

/// Steepest slope the discretization has to resolve: the largest slope of
/// the convex envelopes of `h` and its dual, or of the optimal spread
/// function, whichever is larger, and at least 1.
pub fn slope_scale(d: &Distortion, class: DistClass, direction: Direction) -> f64 {
    let last = |x: &Distortion| {
        x.convex_envelope()
            .right_derivative()
            .map_or(0.0, |f| f.values().last().copied().unwrap_or(0.0))
    };
    let spread = bounds::spread_function(d, class, direction);
    let dmax = spread.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    last(d).max(last(&d.dual())).max(dmax).max(1.0)
}

/// A distortion discretized on `n` equally likely atoms.
#[derive(Clone, Debug)]
pub struct DiscretizedProblem {
    pub n: usize,
    /// `w_i = n·(h̃(i/n) - h̃((i-1)/n))`.
    pub weights: Vec<f64>,
    pub spec: MomentSpec,
    pub direction: Direction,
    /// Shortest gap between knots of `h`, of its dual and, for the
    /// symmetric class, the centre.
    pub min_segment_width: f64,
}

/// Cells per segment below which the grid is considered too coarse.
pub const MIN_CELLS: f64 = 4.0;

impl DiscretizedProblem {
    pub fn new(d: &Distortion, spec: MomentSpec, direction: Direction, n: usize) -> DiscretizedProblem {
        let dual = d.dual();
        let nf = n as f64;
        let weights = (1..=n)
            .map(|i| nf * dual.increment(Level::from_ratio(i - 1, n), Level::from_ratio(i, n)))
            .collect();
        DiscretizedProblem {
            n,
            weights,
            spec,
            direction,
            min_segment_width: shortest_gap(d, spec.class),
        }
    }

    /// Direction of the optimal atoms, before scaling.
    fn optimal_shape(&self) -> Vec<f64> {
        let n = self.n;
        let w = &self.weights;
        match (self.spec.class, self.direction) {
            (DistClass::General, Direction::Worst) => pava(w).into_iter().map(|v| v - 1.0).collect(),
            (DistClass::General, Direction::Best) => {
                // increments of the primal distortion are the reversed weights
                let primal: Vec<f64> = w.iter().rev().copied().collect();
                let proj = pava(&primal);
                (0..n).map(|i| 1.0 - proj[n - 1 - i]).collect()
            }
            (DistClass::Symmetric, dir) => {
                let sign = if dir == Direction::Worst { 1.0 } else { -1.0 };
                let anti: Vec<f64> = (0..n).map(|i| sign * 0.5 * (w[i] - w[n - 1 - i])).collect();
                pava(&anti)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleResult {
    pub value: f64,
    pub attained_by_any: bool,
    /// Fewer than [`MIN_CELLS`] grid cells fit in the shortest segment.
    pub unresolved: bool,
    pub n: usize,
}

/// Discretized extremum over `n` equally likely atoms.
pub fn oracle_extreme(d: &Distortion, spec: &MomentSpec, direction: Direction, n: usize) -> Result<OracleResult, OracleError> {
    if n < 2 {
        return Err(OracleError::TooFewAtoms { min: 2, got: n });
    }
    if !spec.mu.is_finite() || !spec.sigma.is_finite() || spec.sigma < 0.0 {
        return Err(OracleError::InvalidSpec(format!("mu = {}, sigma = {}", spec.mu, spec.sigma)));
    }
    let prob = DiscretizedProblem::new(d, *spec, direction, n);
    let unresolved = (n as f64) * prob.min_segment_width < MIN_CELLS;
    let shape = prob.optimal_shape();
    let nf = n as f64;
    let norm = (shape.iter().map(|v| v * v).sum::<f64>() / nf).sqrt();
    if norm <= 1e-12 || spec.sigma == 0.0 {
        return Ok(OracleResult {
            value: spec.mu,
            attained_by_any: norm <= 1e-12,
            unresolved,
            n,
        });
    }
    let value = spec.mu
        + spec.sigma
            * prob
                .weights
                .iter()
                .zip(&shape)
                .map(|(w, y)| w * y)
                .sum::<f64>()
            / (nf * norm);
    Ok(OracleResult {
        value,
        attained_by_any: false,
        unresolved,
        n,
    })
}

fn logistic(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.gen_range(1e-12..1.0 - 1e-12);
    (u / (1.0 - u)).ln()
}

fn positive_mass(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.gen_range(1e-12..1.0);
    -u.ln() + 1e-9
}

/// Random member of the moment class, deterministic under `seed`.
pub fn sample_feasible(spec: &MomentSpec, atoms: usize, seed: u64) -> Result<StepQuantile, OracleError> {
    if atoms < 2 {
        return Err(OracleError::TooFewAtoms { min: 2, got: atoms });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const ATTEMPTS: usize = 16;
    for _ in 0..ATTEMPTS {
        let raw = match spec.class {
            DistClass::General => draw_general(&mut rng, atoms),
            DistClass::Symmetric => draw_symmetric(&mut rng, atoms),
        };
        if spec.sigma == 0.0 {
            return Ok(StepQuantile::degenerate(spec.mu));
        }
        if let Some(q) = raw.and_then(|q| q.standardized(spec.mu, spec.sigma)) {
            return Ok(q);
        }
    }
    Err(OracleError::Degenerate(ATTEMPTS))
}

fn draw_general(rng: &mut ChaCha8Rng, atoms: usize) -> Option<StepQuantile> {
    let mut values: Vec<f64> = (0..atoms).map(|_| logistic(rng)).collect();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let masses: Vec<f64> = (0..atoms).map(|_| positive_mass(rng)).collect();
    let total: f64 = masses.iter().sum();
    let mut acc = 0.0;
    let mut levels: Vec<Level> = masses
        .iter()
        .map(|m| {
            acc += m;
            Level::new(acc / total)
        })
        .collect();
    *levels.last_mut().unwrap() = Level::ONE;
    StepQuantile::new(levels, values).ok()
}

fn draw_symmetric(rng: &mut ChaCha8Rng, atoms: usize) -> Option<StepQuantile> {
    let half = atoms / 2;
    let center = atoms % 2 == 1;
    let mut offsets: Vec<f64> = (0..half).map(|_| logistic(rng).abs() + 1e-6).collect();
    offsets.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let masses: Vec<f64> = (0..half).map(|_| positive_mass(rng)).collect();
    let center_mass = if center { positive_mass(rng) } else { 0.0 };
    let total = 2.0 * masses.iter().sum::<f64>() + center_mass;
    // left half, most negative first; right half mirrors it exactly
    let mut acc = 0.0;
    let left: Vec<Level> = masses
        .iter()
        .map(|m| {
            acc += m;
            Level::new(acc / total)
        })
        .collect();
    let mut levels = left.clone();
    let mut values: Vec<f64> = offsets.iter().map(|o| -o).collect();
    if center {
        levels.push(left[half - 1].flip());
        values.push(0.0);
    }
    for j in (0..half).rev() {
        let lvl = if j == 0 { Level::ONE } else { left[j - 1].flip() };
        levels.push(lvl);
        values.push(offsets[j]);
    }
    if !center {
        // the two middle atoms meet at 1/2
        levels[half - 1] = Level::HALF;
    }
    StepQuantile::new(levels, values).ok()
}

/// GlueVaR tuple drawn from a mixture of generic draws and boundary
/// families (VaR, TVaR, RVaR, `alpha = beta`, `beta` close to 1), so that
/// every closed-form case shows up.
pub fn random_params<R: Rng>(rng: &mut R) -> GlueVaRParams {
    let pick = rng.gen_range(0..10);
    let alpha: f64 = rng.gen_range(0.01..0.99);
    let beta: f64 = match pick {
        0 => alpha,
        1 => 1.0 - rng.gen_range(1e-6..1e-2),
        _ => rng.gen_range(alpha..1.0),
    };
    let (h1, h2) = match pick {
        0 => {
            let h: f64 = rng.gen_range(0.0..=1.0);
            (h, h)
        }
        2 => (0.0, 0.0),
        3 => (1.0, 1.0),
        4 => (0.0, 1.0),
        _ => {
            let a: f64 = rng.gen_range(0.0..1.0);
            let b: f64 = rng.gen_range(0.0..1.0);
            (a.min(b), a.max(b))
        }
    };
    let beta = beta.max(alpha);
    GlueVaRParams::new(alpha, beta, h1, h2).expect("sampled parameters are valid")
}

/// The `index`-th tuple of the stream keyed by `seed`, independent of the
/// order in which tuples are requested.
pub fn params_at(seed: u64, index: u64) -> GlueVaRParams {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    random_params(&mut rng)
}

/// Checks of one bound against the generic engine, the oracle and random members of the class.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub params: GlueVaRParams,
    pub spec: MomentSpec,
    pub direction: Direction,
    pub closed_value: Option<f64>,
    pub case: Option<String>,
    pub generic_value: f64,
    pub oracle_value: f64,
    pub oracle_unresolved: bool,
    pub extreme_sample_value: Option<f64>,
    pub moment_residual: Option<f64>,
    pub attainment_residual: Option<f64>,
    pub closed_vs_generic_ok: bool,
    pub oracle_ok: bool,
    pub samples_ok: bool,
    pub witness_ok: bool,
    pub pass: bool,
}

/// Knobs for [`verify_bound`].
#[derive(Clone, Copy, Debug, Default)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Negative control: perturbs the closed form before checking it.
    pub corrupt_closed_form: bool,
}

/// `|a - b| / max(|a|, |b|, scale)`.
pub fn relative_error(a: f64, b: f64, scale: f64) -> f64 {
    let den = a.abs().max(b.abs()).max(scale);
    if den == 0.0 {
        0.0
    } else {
        (a - b).abs() / den
    }
}

pub fn verify_bound(
    params: &GlueVaRParams,
    spec: &MomentSpec,
    direction: Direction,
    n: usize,
    samples: usize,
    opts: VerifyOptions,
) -> Result<Report, BoundError> {
    let d = params.distortion();
    let closed = match bounds::gluevar_bound(params, spec, direction) {
        Ok(r) => Some(r),
        Err(BoundError::UnsupportedRegime { .. }) => None,
        Err(e) => return Err(e),
    };
    let generic = bounds::extreme_generic(&d, spec, direction)?;
    let oracle = oracle_extreme(&d, spec, direction, n.max(2)).map_err(|e| BoundError::InvalidSpec(e.to_string()))?;
    let scale = spec.sigma.max(spec.mu.abs()).max(1.0);
    let bump = if opts.corrupt_closed_form { 1e-3 * (1.0 + spec.sigma) } else { 0.0 };
    let closed_value = closed.as_ref().map(|r| r.value + bump);
    let reference = closed_value.unwrap_or(generic.value);

    let closed_vs_generic_ok = closed_value.is_none_or(|c| relative_error(c, generic.value, spec.sigma) <= 1e-10);
    // equally likely atoms are members of the class, so the oracle can never beat the bound
    let slack = 1e-10 * scale;
    let one_sided = match direction {
        Direction::Worst => oracle.value <= reference + slack,
        Direction::Best => oracle.value >= reference - slack,
    };
    let gap_tol = 20.0 * spec.sigma * slope_scale(&d, spec.class, direction) / n as f64;
    let oracle_ok = one_sided && (oracle.unresolved || (oracle.value - reference).abs() <= gap_tol + slack);

    let mut extreme: Option<f64> = None;
    for k in 0..samples {
        let atoms = 2 + (k % 7);
        let q = sample_feasible(spec, atoms, opts.seed.wrapping_add(k as u64))
            .map_err(|e| BoundError::InvalidSpec(e.to_string()))?;
        let v = choquet_eval(&d, &q);
        extreme = Some(match (extreme, direction) {
            (None, _) => v,
            (Some(e), Direction::Worst) => e.max(v),
            (Some(e), Direction::Best) => e.min(v),
        });
    }
    let samples_ok = extreme.is_none_or(|e| match direction {
        Direction::Worst => e <= reference + 1e-10 * scale,
        Direction::Best => e >= reference - 1e-10 * scale,
    });

    let source = closed.as_ref().unwrap_or(&generic);
    let (moment_residual, attainment_residual, witness_ok) = match (&source.witness, &source.limit_witness) {
        (Some(w), _) => {
            let (m, a) = bounds::witness_residuals(&d, spec, w, reference);
            let sym = spec.class == DistClass::General || is_symmetric(w, 1e-10 * scale);
            (Some(m), Some(a), m <= 1e-10 * scale && a <= 1e-10 * scale && sym)
        }
        (None, Some(w)) => {
            let reg = d.with_jump_side(d.jump_value().opposite());
            let (m, a) = bounds::witness_residuals(&reg, spec, w, reference);
            (Some(m), Some(a), m <= 1e-10 * scale && a <= 1e-10 * scale)
        }
        (None, None) => (None, None, true),
    };

    let pass = closed_vs_generic_ok && oracle_ok && samples_ok && witness_ok;
    Ok(Report {
        params: *params,
        spec: *spec,
        direction,
        closed_value,
        case: closed.as_ref().map(|r| r.case.label.to_string()),
        generic_value: generic.value,
        oracle_value: oracle.value,
        oracle_unresolved: oracle.unresolved,
        extreme_sample_value: extreme,
        moment_residual,
        attainment_residual,
        closed_vs_generic_ok,
        oracle_ok,
        samples_ok,
        witness_ok,
        pass,
    })
}

/// Mean and standard deviation of `q`, for reporting.
pub fn mean_sd(q: &StepQuantile) -> (f64, f64) {
    let (m, v) = moments(q);
    (m, v.max(0.0).sqrt())
}
