//! Worst- and best-case values over moment classes.
//!
//! Every bound has the form `μ ± σ‖D‖₂` where `D` is the right derivative of
//! the convex envelope of a piecewise-linear function `Γ` built from the
//! distortion `h` and its dual `h̃`:
//!
//! | direction | class     | `Γ`             | sign |
//! |-----------|-----------|-----------------|------|
//! | worst     | general   | `h̃ - id`        | `+`  |
//! | best      | general   | `id - h̃`        | `-`  |
//! | worst     | symmetric | `(h̃ - h) / 2`   | `+`  |
//! | best      | symmetric | `(h - h̃) / 2`   | `-`  |
//!
//! The extremal quantile is `μ + σ D / ‖D‖₂`. When the envelope has a vertex
//! at a jump of `h` the extremum may only be approached; [`Attainment`]
//! records which of the outcomes applies, decided by evaluating the candidate
//! against the distortion.

use crate::choquet::{choquet_eval, is_symmetric, moments, DistClass, MomentSpec, StepQuantile};
use crate::distortion::{Distortion, DistortionError, GlueVaRParams, SlopeTriple, TIE_TOL};
use crate::level::Level;
use crate::plf::Plf;
use crate::step::StepFunction;
use serde::Serialize;
use std::fmt;
use thiserror::Error;

/// Below this `‖D‖₂` the bound collapses to `μ`.
pub const ZERO_NORM: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("invalid moment spec: {0}")]
    InvalidSpec(String),
    #[error("closed form requested for class {expected:?} but spec has class {got:?}")]
    WrongClass { expected: DistClass, got: DistClass },
    #[error("no closed form for the symmetric class when alpha < 1/2 <= beta (alpha = {alpha}, beta = {beta}); use the generic engine")]
    UnsupportedRegime { alpha: f64, beta: f64 },
    #[error("candidate extremal distribution does not reproduce the bound (residual {residual:e})")]
    WitnessMismatch { residual: f64 },
    #[error(transparent)]
    Distortion(#[from] DistortionError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Worst,
    Best,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Worst => 1.0,
            Direction::Best => -1.0,
        }
    }
}

/// Position of `(alpha, beta)` relative to 1/2, which selects the symmetric formulas.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    AlphaAtLeastHalf,
    BetaBelowHalf,
    Straddle,
}

impl Regime {
    pub fn of(params: &GlueVaRParams) -> Regime {
        if params.alpha >= 0.5 {
            Regime::AlphaAtLeastHalf
        } else if params.beta < 0.5 {
            Regime::BetaBelowHalf
        } else {
            Regime::Straddle
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CaseLabel {
    #[serde(rename = "W-G-i")]
    WGi,
    #[serde(rename = "W-G-ii")]
    WGii,
    #[serde(rename = "W-S-i")]
    WSi,
    #[serde(rename = "W-S-ii")]
    WSii,
    #[serde(rename = "W-S-sub-half-i")]
    WSSubHalfI,
    #[serde(rename = "W-S-sub-half-ii")]
    WSSubHalfII,
    #[serde(rename = "B-G-i")]
    BGi,
    #[serde(rename = "B-G-ii")]
    BGii,
    #[serde(rename = "B-G-iii")]
    BGiii,
    #[serde(rename = "B-G-iv")]
    BGiv,
    #[serde(rename = "B-S-i")]
    BSi,
    #[serde(rename = "B-S-ii")]
    BSii,
    #[serde(rename = "B-S-iii")]
    BSiii,
    #[serde(rename = "B-S-iv")]
    BSiv,
    #[serde(rename = "generic")]
    Generic,
}

impl CaseLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseLabel::WGi => "W-G-i",
            CaseLabel::WGii => "W-G-ii",
            CaseLabel::WSi => "W-S-i",
            CaseLabel::WSii => "W-S-ii",
            CaseLabel::WSSubHalfI => "W-S-sub-half-i",
            CaseLabel::WSSubHalfII => "W-S-sub-half-ii",
            CaseLabel::BGi => "B-G-i",
            CaseLabel::BGii => "B-G-ii",
            CaseLabel::BGiii => "B-G-iii",
            CaseLabel::BGiv => "B-G-iv",
            CaseLabel::BSi => "B-S-i",
            CaseLabel::BSii => "B-S-ii",
            CaseLabel::BSiii => "B-S-iii",
            CaseLabel::BSiv => "B-S-iv",
            CaseLabel::Generic => "generic",
        }
    }

    pub const ALL_CLOSED: [CaseLabel; 14] = [
        CaseLabel::WGi,
        CaseLabel::WGii,
        CaseLabel::WSi,
        CaseLabel::WSii,
        CaseLabel::WSSubHalfI,
        CaseLabel::WSSubHalfII,
        CaseLabel::BGi,
        CaseLabel::BGii,
        CaseLabel::BGiii,
        CaseLabel::BGiv,
        CaseLabel::BSi,
        CaseLabel::BSii,
        CaseLabel::BSiii,
        CaseLabel::BSiv,
    ];
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CaseId {
    pub direction: Direction,
    pub class: DistClass,
    pub label: CaseLabel,
    pub regime: Option<Regime>,
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label.as_str())
    }
}

/// How the bound relates to the distributions of the class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Attainment {
    /// `witness` reaches the bound.
    Attained,
    /// Every member of the class gives the same value.
    AttainedByAny,
    /// The bound is a limit; `limit_witness` reaches it under the distortion
    /// with its jumps flipped to the other side, and [`epsilon_witness`]
    /// produces members arbitrarily close to it.
    Approached,
    /// The bound is a limit with no distinguished limiting distribution.
    NotAttained,
}

/// Scalars computed on the way to a closed form.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ClosedFormIntermediates {
    pub k1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k3: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
    /// `‖D‖₂²`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spread_sq: Option<f64>,
    pub weights: Option<[f64; 3]>,
}

impl ClosedFormIntermediates {
    fn from_params(p: &GlueVaRParams) -> ClosedFormIntermediates {
        let s = p.slopes();
        ClosedFormIntermediates {
            k1: s.k1,
            k2: Some(s.k2),
            k3: Some(s.k3),
            weights: p.mixture_weights().ok(),
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundResult {
    pub value: f64,
    pub case: CaseId,
    pub attainment: Attainment,
    pub attained_by_any: bool,
    pub witness: Option<StepQuantile>,
    pub limit_witness: Option<StepQuantile>,
    pub intermediates: ClosedFormIntermediates,
}

impl BoundResult {
    pub fn infimum_not_attained(&self) -> bool {
        matches!(self.attainment, Attainment::Approached | Attainment::NotAttained)
    }
}

/// A bound before attainment has been settled.
struct Draft {
    value: f64,
    /// Normalized direction `D / ‖D‖₂`; `None` when `‖D‖₂ = 0`.
    direction: Option<StepFunction>,
}

fn check_spec(spec: &MomentSpec) -> Result<(), BoundError> {
    if !spec.mu.is_finite() || !spec.sigma.is_finite() || spec.sigma < 0.0 {
        return Err(BoundError::InvalidSpec(format!(
            "need finite mu and sigma >= 0, got mu = {}, sigma = {}",
            spec.mu, spec.sigma
        )));
    }
    Ok(())
}

/// `Γ` for the given direction and class, as a piecewise-linear function.
pub fn gamma(d: &Distortion, class: DistClass, direction: Direction) -> Plf {
    let dual = d.dual();
    let id = Distortion::identity();
    let s = direction.sign();
    match class {
        DistClass::General => Plf::combine(&[(s, &dual), (-s, &id)]),
        DistClass::Symmetric => Plf::combine(&[(0.5 * s, &dual), (-0.5 * s, d)]),
    }
}

/// `D`, the right derivative of the convex envelope of `Γ`.
pub fn spread_function(d: &Distortion, class: DistClass, direction: Direction) -> StepFunction {
    match (class, direction) {
        (DistClass::General, Direction::Worst) => d
            .dual()
            .convex_envelope()
            .right_derivative()
            .expect("envelopes are continuous")
            .map(|g| g - 1.0),
        (DistClass::General, Direction::Best) => d
            .convex_envelope()
            .right_derivative()
            .expect("envelopes are continuous")
            .reflect()
            .map(|g| 1.0 - g),
        (DistClass::Symmetric, _) => gamma(d, class, direction).symmetric_minorant_slope(),
    }
}

/// Bound for an arbitrary piecewise-linear distortion.
pub fn extreme_generic(d: &Distortion, spec: &MomentSpec, direction: Direction) -> Result<BoundResult, BoundError> {
    check_spec(spec)?;
    let dfun = spread_function(d, spec.class, direction);
    let norm_sq = dfun.squared_deviation(0.0);
    let norm = norm_sq.sqrt();
    let draft = if norm <= ZERO_NORM {
        Draft {
            value: spec.mu,
            direction: None,
        }
    } else {
        Draft {
            value: spec.mu + direction.sign() * spec.sigma * norm,
            direction: Some(dfun.map(|v| v / norm)),
        }
    };
    let case = CaseId {
        direction,
        class: spec.class,
        label: CaseLabel::Generic,
        regime: None,
    };
    let intermediates = ClosedFormIntermediates {
        spread_sq: Some(norm_sq),
        ..Default::default()
    };
    settle(d, spec, direction, case, draft, intermediates)
}

fn ge(a: f64, b: f64) -> bool {
    a >= b - TIE_TOL
}

fn gt(a: f64, b: f64) -> bool {
    a > b + TIE_TOL
}

/// Case label of the closed form that applies.
pub fn classify_gluevar_case(
    params: &GlueVaRParams,
    direction: Direction,
    class: DistClass,
) -> Result<CaseId, BoundError> {
    let s = params.slopes();
    let regime = Regime::of(params);
    let label = match (direction, class) {
        (Direction::Worst, DistClass::General) => worst_general_label(params, &s),
        (Direction::Best, DistClass::General) => best_general_label(params, &s),
        (Direction::Worst, DistClass::Symmetric) => match regime {
            Regime::AlphaAtLeastHalf => {
                if worst_general_label(params, &s) == CaseLabel::WGi {
                    CaseLabel::WSi
                } else {
                    CaseLabel::WSii
                }
            }
            Regime::BetaBelowHalf => {
                if s.k2 * (1.0 - params.alpha) <= 1.0 + TIE_TOL {
                    CaseLabel::WSSubHalfI
                } else {
                    CaseLabel::WSSubHalfII
                }
            }
            Regime::Straddle => return Err(unsupported(params)),
        },
        (Direction::Best, DistClass::Symmetric) => match regime {
            Regime::AlphaAtLeastHalf => CaseLabel::BSi,
            Regime::BetaBelowHalf => {
                let (a, b) = best_symmetric_ab(params, &s);
                if ge(a, 0.0) && ge(b, 0.0) {
                    CaseLabel::BSi
                } else if gt(b, a) && a < 0.0 {
                    CaseLabel::BSii
                } else if ge(a, b) && gt(params.alpha * b, a * params.beta) {
                    CaseLabel::BSiii
                } else {
                    CaseLabel::BSiv
                }
            }
            Regime::Straddle => return Err(unsupported(params)),
        },
    };
    let regime = (class == DistClass::Symmetric).then_some(regime);
    Ok(CaseId {
        direction,
        class,
        label,
        regime,
    })
}

fn unsupported(p: &GlueVaRParams) -> BoundError {
    BoundError::UnsupportedRegime {
        alpha: p.alpha,
        beta: p.beta,
    }
}

fn worst_general_label(p: &GlueVaRParams, s: &SlopeTriple) -> CaseLabel {
    let two_point = match s.k1 {
        None => true,
        Some(k1) => ge(k1, s.k2) || ge(1.0 - p.h1, (p.beta - p.alpha) / (1.0 - p.alpha)),
    };
    if two_point {
        CaseLabel::WGi
    } else {
        CaseLabel::WGii
    }
}

fn best_general_label(p: &GlueVaRParams, s: &SlopeTriple) -> CaseLabel {
    let k2_dominates = s.k1.is_none_or(|k1| ge(s.k2, k1));
    let lower_jump = ge(p.h2, 1.0 - p.alpha);
    if k2_dominates && lower_jump {
        return CaseLabel::BGi;
    }
    if let Some(k1) = s.k1 {
        if gt(k1, s.k2.max(s.k3)) && ge(s.k2, 1.0) {
            return CaseLabel::BGi;
        }
    }
    if k2_dominates {
        return CaseLabel::BGii;
    }
    let k1 = s.k1.expect("k1 exists when k2 does not dominate");
    if gt(s.k3, k1) && gt(k1, s.k2) {
        CaseLabel::BGiii
    } else {
        CaseLabel::BGiv
    }
}

/// Values of `(h - h̃)/2` at its two candidate vertices `α` and `β` when `β < 1/2`.
fn best_symmetric_ab(p: &GlueVaRParams, s: &SlopeTriple) -> (f64, f64) {
    (p.alpha * (s.k2 - s.k3) / 2.0, (s.k2 - 1.0) / 2.0)
}

/// Step function from `(start, value)` pairs with starts in increasing order.
fn steps(pieces: &[(Level, f64)]) -> StepFunction {
    StepFunction::new(pieces.iter().map(|x| x.0).collect(), pieces.iter().map(|x| x.1).collect())
}

/// Antisymmetric step function from its values on `[0, 1/2)`.
fn antisymmetric(left: &[(Level, f64)]) -> StepFunction {
    let mut pieces: Vec<(Level, f64)> = left.to_vec();
    let n = left.len();
    for i in (0..n).rev() {
        let end = if i + 1 < n { left[i + 1].0 } else { Level::HALF };
        pieces.push((end.flip(), -left[i].1));
    }
    steps(&pieces)
}

fn two_point(at: Level) -> StepFunction {
    let (p, q) = (at.value(), at.complement());
    steps(&[(Level::ZERO, -(q / p).sqrt()), (at, (p / q).sqrt())])
}

fn symmetric_tails(t: Level) -> StepFunction {
    let c = 1.0 / (2.0 * t.value()).sqrt();
    antisymmetric(&[(Level::ZERO, -c), (t, 0.0)])
}

/// Closed-form bound for a GlueVaR distortion.
pub fn gluevar_bound(params: &GlueVaRParams, spec: &MomentSpec, direction: Direction) -> Result<BoundResult, BoundError> {
    match (direction, spec.class) {
        (Direction::Worst, DistClass::General) => gluevar_worst_general(params, spec),
        (Direction::Worst, DistClass::Symmetric) => gluevar_worst_symmetric(params, spec),
        (Direction::Best, DistClass::General) => gluevar_best_general(params, spec),
        (Direction::Best, DistClass::Symmetric) => gluevar_best_symmetric(params, spec),
    }
}

fn require_class(spec: &MomentSpec, expected: DistClass) -> Result<(), BoundError> {
    check_spec(spec)?;
    if spec.class != expected {
        return Err(BoundError::WrongClass {
            expected,
            got: spec.class,
        });
    }
    Ok(())
}

/// Draft from an unnormalized spread function with known squared norm.
fn draft_from(spec: &MomentSpec, direction: Direction, dfun: StepFunction, norm_sq: f64) -> Draft {
    let norm = norm_sq.sqrt();
    if norm <= ZERO_NORM {
        return Draft {
            value: spec.mu,
            direction: None,
        };
    }
    Draft {
        value: spec.mu + direction.sign() * spec.sigma * norm,
        direction: Some(dfun.map(|v| v / norm)),
    }
}

pub fn gluevar_worst_general(params: &GlueVaRParams, spec: &MomentSpec) -> Result<BoundResult, BoundError> {
    require_class(spec, DistClass::General)?;
    let case = classify_gluevar_case(params, Direction::Worst, DistClass::General)?;
    let mut im = ClosedFormIntermediates::from_params(params);
    let (a, b, h1) = (params.alpha, params.beta, params.h1);
    let la = Level::new(a);
    let draft = match case.label {
        CaseLabel::WGi => {
            let dfun = steps(&[(Level::ZERO, -1.0), (la, a / (1.0 - a))]);
            draft_from(spec, Direction::Worst, dfun, a / (1.0 - a))
        }
        _ => {
            let k2 = h1 / (1.0 - b);
            let mid = (1.0 - h1) / (b - a);
            let eta = a + (1.0 - h1 - b + a).powi(2) / (b - a) + (h1 - 1.0 + b).powi(2) / (1.0 - b);
            im.eta = Some(eta);
            let dfun = steps(&[(Level::ZERO, -1.0), (la, mid - 1.0), (Level::new(b), k2 - 1.0)]);
            draft_from(spec, Direction::Worst, dfun, eta)
        }
    };
    im.spread_sq = Some(((draft.value - spec.mu) / spec.sigma).powi(2)).filter(|_| spec.sigma > 0.0);
    settle(&params.distortion(), spec, Direction::Worst, case, draft, im)
}

pub fn gluevar_worst_symmetric(params: &GlueVaRParams, spec: &MomentSpec) -> Result<BoundResult, BoundError> {
    require_class(spec, DistClass::Symmetric)?;
    let case = classify_gluevar_case(params, Direction::Worst, DistClass::Symmetric)?;
    let mut im = ClosedFormIntermediates::from_params(params);
    let (a, b, h1) = (params.alpha, params.beta, params.h1);
    let k2 = h1 / (1.0 - b);
    let (dfun, norm_sq) = match case.label {
        CaseLabel::WSi => {
            let c = 0.5 / (1.0 - a);
            (antisymmetric(&[(Level::ZERO, -c), (Level::complement_of(a), 0.0)]), 1.0 / (2.0 * (1.0 - a)))
        }
        CaseLabel::WSii => {
            let zeta = h1 * h1 * (1.0 - a) + (1.0 - 2.0 * h1) * (1.0 - b);
            im.zeta = Some(zeta);
            let outer = k2 / 2.0;
            let inner = (1.0 - h1) / (2.0 * (b - a));
            let f = antisymmetric(&[
                (Level::ZERO, -outer),
                (Level::complement_of(b), -inner),
                (Level::complement_of(a), 0.0),
            ]);
            (f, zeta / (2.0 * (1.0 - b) * (b - a)))
        }
        CaseLabel::WSSubHalfI => {
            // Tails of mass alpha carry the whole spread; when k2 = 0 the same
            // three-point law still reaches the value mu.
            let c = 1.0 / (2.0 * a).sqrt();
            let f = antisymmetric(&[(Level::ZERO, -c), (Level::new(a), 0.0)]);
            let norm_sq = a * k2 * k2 / 2.0;
            im.spread_sq = Some(norm_sq);
            let draft = Draft {
                value: spec.mu + spec.sigma * norm_sq.sqrt(),
                direction: Some(f),
            };
            return settle(&params.distortion(), spec, Direction::Worst, case, draft, im);
        }
        _ => {
            let outer = k2 / 2.0;
            let inner = (k2 * (1.0 - a) - 1.0) / (2.0 * (b - a));
            let f = antisymmetric(&[(Level::ZERO, -outer), (Level::new(a), -inner), (Level::new(b), 0.0)]);
            let norm_sq = a * k2 * k2 / 2.0 + (k2 * (1.0 - a) - 1.0).powi(2) / (2.0 * (b - a));
            (f, norm_sq)
        }
    };
    im.spread_sq = Some(norm_sq);
    let draft = draft_from(spec, Direction::Worst, dfun, norm_sq);
    settle(&params.distortion(), spec, Direction::Worst, case, draft, im)
}

pub fn gluevar_best_general(params: &GlueVaRParams, spec: &MomentSpec) -> Result<BoundResult, BoundError> {
    require_class(spec, DistClass::General)?;
    let case = classify_gluevar_case(params, Direction::Best, DistClass::General)?;
    let mut im = ClosedFormIntermediates::from_params(params);
    let (a, b, h1, h2) = (params.alpha, params.beta, params.h1, params.h2);
    let s = params.slopes();
    let (value, dfun) = match case.label {
        CaseLabel::BGi => (spec.mu, None),
        CaseLabel::BGii => (
            spec.mu + spec.sigma * (h2 - 1.0 + a) / (a * (1.0 - a)).sqrt(),
            Some(two_point(Level::new(a))),
        ),
        CaseLabel::BGiii => {
            let k1 = s.k1.expect("middle segment exists");
            let xi = a * (s.k3 - 1.0).powi(2) + (b - a) * (k1 - 1.0).powi(2) + (1.0 - b) * (s.k2 - 1.0).powi(2);
            im.xi = Some(xi);
            let norm = xi.sqrt();
            let f = steps(&[
                (Level::ZERO, (1.0 - s.k3) / norm),
                (Level::new(a), (1.0 - k1) / norm),
                (Level::new(b), (1.0 - s.k2) / norm),
            ]);
            (spec.mu - spec.sigma * norm, Some(f))
        }
        _ => (
            spec.mu + spec.sigma * (h1 - 1.0 + b) / (b * (1.0 - b)).sqrt(),
            Some(two_point(Level::new(b))),
        ),
    };
    if spec.sigma > 0.0 {
        im.spread_sq = Some(((value - spec.mu) / spec.sigma).powi(2));
    }
    let draft = Draft {
        value,
        direction: dfun,
    };
    settle(&params.distortion(), spec, Direction::Best, case, draft, im)
}

pub fn gluevar_best_symmetric(params: &GlueVaRParams, spec: &MomentSpec) -> Result<BoundResult, BoundError> {
    require_class(spec, DistClass::Symmetric)?;
    let case = classify_gluevar_case(params, Direction::Best, DistClass::Symmetric)?;
    let mut im = ClosedFormIntermediates::from_params(params);
    let (al, be) = (params.alpha, params.beta);
    let s = params.slopes();
    let (a, b) = best_symmetric_ab(params, &s);
    let (la, lb) = (Level::new(al), Level::new(be));
    let draft = match case.label {
        CaseLabel::BSi => {
            im.spread_sq = Some(0.0);
            Draft {
                value: spec.mu,
                direction: None,
            }
        }
        CaseLabel::BSii => {
            let f = antisymmetric(&[(Level::ZERO, a / al), (la, 0.0)]);
            let n2 = 2.0 * a * a / al;
            im.spread_sq = Some(n2);
            draft_from(spec, Direction::Best, f, n2)
        }
        CaseLabel::BSiii => {
            let f = antisymmetric(&[(Level::ZERO, a / al), (la, (b - a) / (be - al)), (lb, 0.0)]);
            let n2 = 2.0 * a * a / al + 2.0 * (b - a).powi(2) / (be - al);
            im.spread_sq = Some(n2);
            draft_from(spec, Direction::Best, f, n2)
        }
        _ => {
            let f = antisymmetric(&[(Level::ZERO, b / be), (lb, 0.0)]);
            let n2 = 2.0 * b * b / be;
            im.spread_sq = Some(n2);
            draft_from(spec, Direction::Best, f, n2)
        }
    };
    settle(&params.distortion(), spec, Direction::Best, case, draft, im)
}

fn tolerance(spec: &MomentSpec) -> f64 {
    1e-10 * spec.mu.abs().max(spec.sigma).max(1.0)
}

/// `(moment residual, attainment residual)` of `q` for the bound `value`.
pub fn witness_residuals(d: &Distortion, spec: &MomentSpec, q: &StepQuantile, value: f64) -> (f64, f64) {
    let (m, v) = moments(q);
    let moment = (m - spec.mu).abs().max((v.max(0.0).sqrt() - spec.sigma).abs());
    (moment, (choquet_eval(d, q) - value).abs())
}

fn admissible(d: &Distortion, spec: &MomentSpec, q: &StepQuantile, value: f64) -> bool {
    let tol = tolerance(spec);
    let (m, a) = witness_residuals(d, spec, q, value);
    m <= tol && a <= tol && (spec.class == DistClass::General || is_symmetric(q, tol))
}

/// Decides attainment of a drafted bound by evaluating candidate laws.
fn settle(
    d: &Distortion,
    spec: &MomentSpec,
    direction: Direction,
    case: CaseId,
    draft: Draft,
    intermediates: ClosedFormIntermediates,
) -> Result<BoundResult, BoundError> {
    let mut out = BoundResult {
        value: draft.value,
        case,
        attainment: Attainment::NotAttained,
        attained_by_any: false,
        witness: None,
        limit_witness: None,
        intermediates,
    };
    if spec.sigma == 0.0 {
        out.value = spec.mu;
        out.attainment = Attainment::Attained;
        out.witness = Some(StepQuantile::degenerate(spec.mu));
        return Ok(out);
    }
    let regularized = d.with_jump_side(d.jump_value().opposite());
    match draft.direction {
        Some(f) => {
            let q = StepQuantile::from_step(&f, spec.mu, spec.sigma);
            if admissible(d, spec, &q, out.value) {
                out.attainment = Attainment::Attained;
                out.witness = Some(q);
            } else if d.has_jumps() && admissible(&regularized, spec, &q, out.value) {
                out.attainment = Attainment::Approached;
                out.limit_witness = Some(q);
            } else {
                let (_, residual) = witness_residuals(d, spec, &q, out.value);
                return Err(BoundError::WitnessMismatch { residual });
            }
        }
        None => {
            let g = gamma(d, spec.class, direction);
            if g.sup_norm() <= ZERO_NORM {
                out.attainment = Attainment::AttainedByAny;
                out.attained_by_any = true;
                return Ok(out);
            }
            let candidates: Vec<StepQuantile> = g
                .near_zeros(1e-12)
                .into_iter()
                .filter_map(|t| match spec.class {
                    DistClass::General => Some(two_point(t)),
                    DistClass::Symmetric if t <= Level::HALF => Some(symmetric_tails(t)),
                    DistClass::Symmetric => None,
                })
                .map(|f| StepQuantile::from_step(&f, spec.mu, spec.sigma))
                .collect();
            if let Some(q) = candidates.iter().find(|q| admissible(d, spec, q, out.value)) {
                out.attainment = Attainment::Attained;
                out.witness = Some(q.clone());
            } else if let Some(q) = candidates.iter().find(|q| admissible(&regularized, spec, q, out.value)) {
                out.attainment = Attainment::Approached;
                out.limit_witness = Some(q.clone());
            }
        }
    }
    Ok(out)
}

/// A member of the class whose value is within `eps` of the bound.
pub fn epsilon_witness(d: &Distortion, spec: &MomentSpec, result: &BoundResult, eps: f64) -> Option<StepQuantile> {
    let within = |q: &StepQuantile| (choquet_eval(d, q) - result.value).abs() <= eps;
    match result.attainment {
        Attainment::Attained => result.witness.clone(),
        Attainment::AttainedByAny => {
            let q = StepQuantile::from_step(&two_point(Level::HALF), spec.mu, spec.sigma);
            Some(q)
        }
        Attainment::Approached => {
            let base = result.limit_witness.as_ref()?;
            let jumps: Vec<Level> = d.jumps().collect();
            // push levels sitting on a jump into the side the limit law assumed
            let up = d.jump_value() == crate::distortion::Side::Right;
            let min_mass = (0..base.len()).map(|i| base.mass(i)).fold(1.0, f64::min);
            let mut delta = 0.25 * min_mass;
            for _ in 0..80 {
                let mut levels = base.levels().to_vec();
                let n = levels.len();
                for i in 0..n.saturating_sub(1) {
                    let on_jump = jumps.iter().any(|j| (j.value() - levels[i].complement()).abs() <= 1e-12);
                    if on_jump {
                        let shift = if up { delta } else { -delta };
                        levels[i] = Level::new(levels[i].value() + shift);
                        if spec.class == DistClass::Symmetric {
                            let partner = n - 2 - i;
                            if partner != i {
                                levels[partner] = Level::new(levels[partner].value() - shift);
                            }
                        }
                    }
                }
                if let Ok(q) = StepQuantile::new(levels, base.values().to_vec()) {
                    if let Some(q) = q.standardized(spec.mu, spec.sigma) {
                        if within(&q) {
                            return Some(q);
                        }
                    }
                }
                delta *= 0.5;
            }
            None
        }
        Attainment::NotAttained => {
            let mut t = 0.01;
            for _ in 0..200 {
                let lt = Level::new(t);
                let cands: Vec<StepFunction> = match spec.class {
                    DistClass::General => vec![two_point(lt), two_point(lt.flip())],
                    DistClass::Symmetric => vec![symmetric_tails(lt)],
                };
                for f in cands {
                    let q = StepQuantile::from_step(&f, spec.mu, spec.sigma);
                    if within(&q) {
                        return Some(q);
                    }
                }
                t *= 0.5;
                if t < 1e-300 {
                    break;
                }
            }
            None
        }
    }
}

/// Convergence of the RVaR best case towards its VaR and TVaR limits.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitsReport {
    pub alpha: f64,
    pub beta: f64,
    pub rvar_best: f64,
    pub rvar_best_formula: f64,
    pub rvar_near_alpha: f64,
    pub var_best: f64,
    pub rvar_near_one: f64,
    pub tvar_best: f64,
    pub pass: bool,
}

/// Evaluates the RVaR best case at `β`, at `α + 1e-6` and at `1 - 1e-9` for `μ = 0, σ = 1`.
pub fn remark_limits_check(alpha: f64, beta: f64) -> Result<LimitsReport, BoundError> {
    use crate::distortion::SpecialKind;
    let spec = MomentSpec::general(0.0, 1.0).map_err(|e| BoundError::InvalidSpec(e.to_string()))?;
    let best = |b: f64| -> Result<f64, BoundError> {
        let p = GlueVaRParams::special(SpecialKind::Rvar, alpha, Some(b))?;
        Ok(gluevar_best_general(&p, &spec)?.value)
    };
    let rvar_best = best(beta)?;
    let rvar_near_alpha = best(alpha + 1e-6)?;
    let rvar_near_one = best(1.0 - 1e-9)?;
    let var = GlueVaRParams::special(SpecialKind::Var, alpha, None)?;
    let var_best = gluevar_best_general(&var, &spec)?.value;
    let tvar = GlueVaRParams::special(SpecialKind::Tvar, alpha, None)?;
    let tvar_best = gluevar_best_general(&tvar, &spec)?.value;
    let rvar_best_formula = -((1.0 - beta) / beta).sqrt();
    let pass = (rvar_best - rvar_best_formula).abs() <= 1e-12
        && (rvar_near_alpha - var_best).abs() <= 1e-5
        && (rvar_near_one - tvar_best).abs() <= 1e-4;
    Ok(LimitsReport {
        alpha,
        beta,
        rvar_best,
        rvar_best_formula,
        rvar_near_alpha,
        var_best,
        rvar_near_one,
        tvar_best,
        pass,
    })
}
