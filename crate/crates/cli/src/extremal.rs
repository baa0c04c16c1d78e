use std::path::PathBuf;

use gluevar_core::bounds::witness_residuals;
use gluevar_core::choquet::is_symmetric;
use gluevar_core::{Attainment, DistClass, Direction, MomentSpec};
use serde::Serialize;
use serde_json::json;

use crate::args::{DirectionArg, ExtremalArgs};
use crate::bound::{compute, spec_of};
use crate::output::{num, print_json, write_csv, write_json, CliError, EXIT_NO_WITNESS};

#[derive(Debug, Serialize)]
struct Residuals {
    measure: String,
    mu: f64,
    sigma: f64,
    class: DistClass,
    direction: Direction,
    value: f64,
    case: String,
    attainment: Attainment,
    /// The file holds the limiting distribution of an approached bound.
    limit: bool,
    atoms: usize,
    moment_residual: f64,
    attainment_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    symmetric: Option<bool>,
    csv: PathBuf,
    sidecar: PathBuf,
}

fn tolerance(spec: &MomentSpec) -> f64 {
    1e-10 * spec.sigma.max(spec.mu.abs()).max(1.0)
}

pub fn run(args: &ExtremalArgs) -> Result<(), CliError> {
    let dir = match args.direction {
        DirectionArg::Worst => Direction::Worst,
        DirectionArg::Best => Direction::Best,
        DirectionArg::Both => return Err(CliError::invalid("extremal needs --direction worst or best")),
    };
    let (params, spec) = spec_of(&args.moments)?;
    let r = compute(&params, &spec, dir, args.engine)?;
    let d = params.distortion();
    let context = json!({
        "value": r.value,
        "case": r.case.label.as_str(),
        "attainment": r.attainment,
    });
    let (witness, limit, target) = match (r.attainment, &r.witness, &r.limit_witness) {
        (Attainment::Attained, Some(w), _) => (w, false, d.clone()),
        (Attainment::Approached, _, Some(w)) if args.allow_limit => {
            (w, true, d.with_jump_side(d.jump_value().opposite()))
        }
        (Attainment::AttainedByAny, ..) => {
            return Err(CliError::new(
                EXIT_NO_WITNESS,
                "attained-by-any",
                "every distribution in the class gives the same value, so there is no distinguished extremal distribution",
            )
            .with("bound", context))
        }
        (Attainment::Approached, ..) => {
            return Err(CliError::new(
                EXIT_NO_WITNESS,
                "not-attained",
                "the bound is approached but not attained; pass --allow-limit to write the limiting distribution",
            )
            .with("bound", context))
        }
        _ => {
            return Err(CliError::new(
                EXIT_NO_WITNESS,
                "not-attained",
                "the bound is a limit with no attaining distribution",
            )
            .with("bound", context))
        }
    };

    let (moment_residual, attainment_residual) = witness_residuals(&target, &spec, witness, r.value);
    let rows: Vec<Vec<String>> = witness
        .levels()
        .iter()
        .zip(witness.values())
        .map(|(p, v)| vec![num(p.value()), num(*v)])
        .collect();
    write_csv(&args.out, &["cum_prob", "value"], &rows)?;
    let sidecar = args
        .sidecar
        .clone()
        .unwrap_or_else(|| args.out.with_extension("residuals.json"));
    let doc = Residuals {
        measure: args.moments.measure.to_string(),
        mu: spec.mu,
        sigma: spec.sigma,
        class: spec.class,
        direction: dir,
        value: r.value,
        case: r.case.label.to_string(),
        attainment: r.attainment,
        limit,
        atoms: witness.len(),
        moment_residual,
        attainment_residual,
        symmetric: (spec.class == DistClass::Symmetric).then(|| is_symmetric(witness, tolerance(&spec))),
        csv: args.out.clone(),
        sidecar: sidecar.clone(),
    };
    write_json(&sidecar, &doc)?;
    print_json(&doc)
}
