use gluevar_core::bounds::{extreme_generic, gluevar_bound};
use gluevar_core::{BoundError, DistClass, Direction, MomentSpec, Regime};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::SweepArgs;
use crate::measure::{Axis, Measure};
use crate::output::{num, print_json, write_csv, CliError};

const HEADER: [&str; 6] = [
    "axis_value",
    "worst_general",
    "worst_symmetric",
    "best_general",
    "best_symmetric",
    "regime",
];

#[derive(Debug, Serialize)]
struct SweepDoc {
    axis: String,
    from: f64,
    to: f64,
    steps: usize,
    rows: usize,
    /// Rows whose symmetric cells come from the generic engine.
    generic_rows: usize,
    out: std::path::PathBuf,
}

struct Point {
    x: f64,
    measure: Measure,
    mu: f64,
    sigma: f64,
}

fn grid(from: f64, to: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![from];
    }
    (0..steps)
        .map(|i| {
            if i + 1 == steps {
                to
            } else {
                from + (to - from) * i as f64 / (steps - 1) as f64
            }
        })
        .collect()
}

fn row(pt: &Point) -> Result<(Vec<String>, bool), CliError> {
    let params = pt.measure.params().map_err(CliError::invalid)?;
    let regime = Regime::of(&params);
    let mut cells = vec![num(pt.x)];
    for dir in [Direction::Worst, Direction::Best] {
        for class in [DistClass::General, DistClass::Symmetric] {
            let spec = MomentSpec::new(pt.mu, pt.sigma, class).map_err(|e| CliError::invalid(e.to_string()))?;
            let v = match gluevar_bound(&params, &spec, dir) {
                Ok(r) => r.value,
                Err(BoundError::UnsupportedRegime { .. }) => extreme_generic(&params.distortion(), &spec, dir)?.value,
                Err(e) => return Err(e.into()),
            };
            cells.push(num(v));
        }
    }
    let name = match regime {
        Regime::AlphaAtLeastHalf => "alpha-at-least-half",
        Regime::BetaBelowHalf => "beta-below-half",
        Regime::Straddle => "straddle-generic",
    };
    cells.push(name.to_string());
    Ok((cells, regime == Regime::Straddle))
}

pub fn run(args: &SweepArgs) -> Result<(), CliError> {
    if args.steps == 0 {
        return Err(CliError::invalid("--steps must be positive"));
    }
    if !args.from.is_finite() || !args.to.is_finite() {
        return Err(CliError::invalid("--from and --to must be finite"));
    }
    // validate every grid point before computing anything
    let points: Vec<Point> = grid(args.from, args.to, args.steps)
        .into_iter()
        .map(|x| {
            let measure = args
                .measure
                .with_param(args.axis, x)
                .map_err(|e| CliError::invalid(format!("{} = {x} leaves the valid region: {e}", args.axis)))?;
            let (mu, sigma) = match args.axis {
                Axis::Mu => (x, args.sigma),
                Axis::Sigma => (args.mu, x),
                _ => (args.mu, args.sigma),
            };
            MomentSpec::general(mu, sigma).map_err(|e| CliError::invalid(format!("{} = {x}: {e}", args.axis)))?;
            Ok(Point { x, measure, mu, sigma })
        })
        .collect::<Result<_, CliError>>()?;

    let rows: Vec<(Vec<String>, bool)> = points.par_iter().map(row).collect::<Result<_, _>>()?;
    let generic_rows = rows.iter().filter(|r| r.1).count();
    let cells: Vec<Vec<String>> = rows.into_iter().map(|r| r.0).collect();
    write_csv(&args.out, &HEADER, &cells)?;
    print_json(&SweepDoc {
        axis: args.axis.to_string(),
        from: args.from,
        to: args.to,
        steps: args.steps,
        rows: cells.len(),
        generic_rows,
        out: args.out.clone(),
    })
}
