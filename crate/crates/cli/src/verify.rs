use gluevar_core::bounds::gluevar_bound;
use gluevar_core::oracle::{params_at, relative_error, verify_bound, Report, VerifyOptions};
use gluevar_core::{DistClass, Direction, GlueVaRParams, MomentSpec, SpecialKind};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::VerifyArgs;
use crate::output::{print_json, CliError, EXIT_VERIFY_FAILED};

const REMARK_ALPHAS: [f64; 4] = [0.5, 0.9, 0.95, 0.99];

#[derive(Debug, Serialize)]
#[serde(untagged)]
enum Outcome {
    Checked(Box<Report>),
    Errored {
        params: GlueVaRParams,
        class: DistClass,
        direction: Direction,
        error: String,
    },
}

#[derive(Debug, Serialize)]
struct Failure {
    index: usize,
    #[serde(flatten)]
    outcome: Outcome,
}

#[derive(Debug, Default, Serialize)]
struct Worst {
    closed_vs_generic: f64,
    oracle_gap_over_sigma: f64,
    moment_residual: f64,
    attainment_residual: f64,
    /// Largest amount by which a random member beat the bound (0 if none did).
    sample_excess: f64,
}

#[derive(Debug, Serialize)]
struct RemarkRow {
    alpha: f64,
    var: f64,
    tvar: f64,
    rvar: f64,
    rvar_beta: f64,
    formula: f64,
    max_deviation: f64,
    equal: bool,
}

#[derive(Debug, Serialize)]
struct VerifyDoc {
    tuples: usize,
    checks: usize,
    passed: usize,
    failed: usize,
    oracle_n: usize,
    samples: usize,
    seed: u64,
    classes: Vec<DistClass>,
    directions: Vec<Direction>,
    oracle_unresolved: usize,
    corrupted: bool,
    worst: Worst,
    #[serde(skip_serializing_if = "Option::is_none")]
    remark_grid: Option<Vec<RemarkRow>>,
    failures: Vec<Failure>,
}

fn remark_params() -> Vec<GlueVaRParams> {
    REMARK_ALPHAS
        .iter()
        .flat_map(|&a| {
            [
                GlueVaRParams::special(SpecialKind::Var, a, None),
                GlueVaRParams::special(SpecialKind::Tvar, a, None),
                GlueVaRParams::special(SpecialKind::Rvar, a, Some((1.0 + a) / 2.0)),
            ]
        })
        .map(|p| p.expect("remark grid is valid"))
        .collect()
}

fn remark_rows(mu: f64, sigma: f64) -> Result<Vec<RemarkRow>, CliError> {
    let spec = MomentSpec::general(mu, sigma).map_err(|e| CliError::invalid(e.to_string()))?;
    let mut rows = Vec::new();
    for &alpha in &REMARK_ALPHAS {
        let worst = |kind, beta| -> Result<f64, CliError> {
            let p = GlueVaRParams::special(kind, alpha, beta).map_err(|e| CliError::invalid(e.to_string()))?;
            Ok(gluevar_bound(&p, &spec, Direction::Worst)?.value)
        };
        let rvar_beta = (1.0 + alpha) / 2.0;
        let var = worst(SpecialKind::Var, None)?;
        let tvar = worst(SpecialKind::Tvar, None)?;
        let rvar = worst(SpecialKind::Rvar, Some(rvar_beta))?;
        let formula = mu + sigma * (alpha / (1.0 - alpha)).sqrt();
        let max_deviation = [var, tvar, rvar].iter().fold(0.0f64, |m, v| m.max((v - formula).abs()));
        rows.push(RemarkRow {
            alpha,
            var,
            tvar,
            rvar,
            rvar_beta,
            formula,
            max_deviation,
            equal: max_deviation <= 1e-12 * sigma.max(mu.abs()).max(1.0),
        });
    }
    Ok(rows)
}

pub fn run(args: &VerifyArgs) -> Result<(), CliError> {
    if args.oracle_n < 2 {
        return Err(CliError::invalid("--oracle-n must be at least 2"));
    }
    let tuples: Vec<GlueVaRParams> = if args.remark_grid {
        remark_params()
    } else if let Some(m) = &args.measure {
        vec![m.params().map_err(CliError::invalid)?]
    } else {
        (0..args.tuples).map(|i| params_at(args.seed, i as u64)).collect()
    };
    let classes = args.class.classes();
    let directions = args.direction.directions();
    let mut jobs = Vec::new();
    for (i, p) in tuples.iter().enumerate() {
        for &class in &classes {
            let spec = MomentSpec::new(args.mu, args.sigma, class).map_err(|e| CliError::invalid(e.to_string()))?;
            for &dir in &directions {
                jobs.push((i, *p, spec, dir));
            }
        }
    }

    let outcomes: Vec<(usize, Outcome)> = jobs
        .par_iter()
        .enumerate()
        .map(|(k, &(i, p, spec, dir))| {
            let opts = VerifyOptions {
                seed: args.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add((k as u64) << 16),
                corrupt_closed_form: args.corrupt_closed_form,
            };
            let outcome = match verify_bound(&p, &spec, dir, args.oracle_n, args.samples, opts) {
                Ok(r) => Outcome::Checked(Box::new(r)),
                Err(e) => Outcome::Errored {
                    params: p,
                    class: spec.class,
                    direction: dir,
                    error: e.to_string(),
                },
            };
            (i, outcome)
        })
        .collect();

    let mut worst = Worst::default();
    let mut unresolved = 0;
    let mut failures = Vec::new();
    for (i, outcome) in outcomes {
        let ok = match &outcome {
            Outcome::Checked(r) => {
                let sigma = r.spec.sigma;
                let reference = r.closed_value.unwrap_or(r.generic_value);
                if let Some(c) = r.closed_value {
                    worst.closed_vs_generic = worst.closed_vs_generic.max(relative_error(c, r.generic_value, sigma));
                }
                if r.oracle_unresolved {
                    unresolved += 1;
                } else if sigma > 0.0 {
                    worst.oracle_gap_over_sigma = worst.oracle_gap_over_sigma.max((r.oracle_value - reference).abs() / sigma);
                }
                worst.moment_residual = worst.moment_residual.max(r.moment_residual.unwrap_or(0.0));
                worst.attainment_residual = worst.attainment_residual.max(r.attainment_residual.unwrap_or(0.0));
                if let Some(e) = r.extreme_sample_value {
                    let excess = match r.direction {
                        Direction::Worst => e - reference,
                        Direction::Best => reference - e,
                    };
                    worst.sample_excess = worst.sample_excess.max(excess);
                }
                r.pass
            }
            Outcome::Errored { .. } => false,
        };
        if !ok {
            failures.push(Failure { index: i, outcome });
        }
    }

    let remark_grid = if args.remark_grid { Some(remark_rows(args.mu, args.sigma)?) } else { None };
    let remark_ok = remark_grid.as_ref().is_none_or(|rows| rows.iter().all(|r| r.equal));
    let checks = jobs.len();
    let doc = VerifyDoc {
        tuples: tuples.len(),
        checks,
        passed: checks - failures.len(),
        failed: failures.len(),
        oracle_n: args.oracle_n,
        samples: args.samples,
        seed: args.seed,
        classes,
        directions,
        oracle_unresolved: unresolved,
        corrupted: args.corrupt_closed_form,
        worst,
        remark_grid,
        failures,
    };
    print_json(&doc)?;
    if doc.failed > 0 || !remark_ok {
        return Err(CliError::new(
            EXIT_VERIFY_FAILED,
            "verification-failed",
            format!("{} of {} checks failed", doc.failed, checks),
        ));
    }
    Ok(())
}
