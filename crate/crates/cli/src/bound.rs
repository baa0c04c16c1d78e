use gluevar_core::bounds::{self, ClosedFormIntermediates};
use gluevar_core::oracle::oracle_extreme;
use gluevar_core::{Attainment, BoundResult, DistClass, Direction, GlueVaRParams, MomentSpec, Regime};
use serde::Serialize;

use crate::args::{BoundArgs, Engine, Moments};
use crate::output::{print_json, CliError};

#[derive(Debug, Serialize)]
pub struct BoundDoc {
    pub measure: String,
    pub params: GlueVaRParams,
    pub mu: f64,
    pub sigma: f64,
    pub class: DistClass,
    pub direction: Direction,
    pub engine: &'static str,
    pub value: f64,
    pub case: String,
    pub regime: Option<Regime>,
    pub attainment: Attainment,
    pub attained_by_any: bool,
    pub intermediates: ClosedFormIntermediates,
    pub generic_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_unresolved: Option<bool>,
}

pub fn spec_of(m: &Moments) -> Result<(GlueVaRParams, MomentSpec), CliError> {
    let params = m.measure.params().map_err(CliError::invalid)?;
    let spec = MomentSpec::new(m.mu, m.sigma, m.class.into()).map_err(|e| CliError::invalid(e.to_string()))?;
    Ok((params, spec))
}

pub fn compute(params: &GlueVaRParams, spec: &MomentSpec, dir: Direction, engine: Engine) -> Result<BoundResult, CliError> {
    let r = match engine {
        Engine::Closed => bounds::gluevar_bound(params, spec, dir)?,
        Engine::Generic => bounds::extreme_generic(&params.distortion(), spec, dir)?,
    };
    Ok(r)
}

pub fn engine_name(engine: Engine) -> &'static str {
    match engine {
        Engine::Closed => "closed",
        Engine::Generic => "generic",
    }
}

pub fn run(args: &BoundArgs) -> Result<(), CliError> {
    let (params, spec) = spec_of(&args.moments)?;
    if args.oracle_n.is_some_and(|n| n < 2) {
        return Err(CliError::invalid("--oracle-n must be at least 2"));
    }
    let d = params.distortion();
    let mut docs = Vec::new();
    for dir in args.direction.directions() {
        let r = compute(&params, &spec, dir, args.engine)?;
        let generic = bounds::extreme_generic(&d, &spec, dir)?;
        let oracle = match args.oracle_n {
            Some(n) => Some(oracle_extreme(&d, &spec, dir, n).map_err(|e| CliError::invalid(e.to_string()))?),
            None => None,
        };
        docs.push(BoundDoc {
            measure: args.moments.measure.to_string(),
            params,
            mu: spec.mu,
            sigma: spec.sigma,
            class: spec.class,
            direction: dir,
            engine: engine_name(args.engine),
            value: r.value,
            case: r.case.label.to_string(),
            regime: r.case.regime,
            attainment: r.attainment,
            attained_by_any: r.attained_by_any,
            intermediates: r.intermediates,
            generic_value: generic.value,
            oracle_value: oracle.as_ref().map(|o| o.value),
            oracle_n: oracle.as_ref().map(|o| o.n),
            oracle_unresolved: oracle.as_ref().map(|o| o.unresolved),
        });
    }
    if docs.len() == 1 {
        print_json(&docs[0])
    } else {
        print_json(&docs)
    }
}
