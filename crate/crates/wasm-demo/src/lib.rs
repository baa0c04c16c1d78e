//! Browser bindings for the GlueVaR bound calculator.
//!
//! Every export takes plain numbers and returns a JSON string, so the page
//! needs nothing beyond `JSON.parse`. Failures come back as `{"error": ...}`.

use gluevar_core::bounds::{extreme_generic, gluevar_bound};
use gluevar_core::{
    Attainment, BoundError, BoundResult, DistClass, Direction, Distortion, GlueVaRParams, MomentSpec, Regime,
};
use serde::Serialize;
use wasm_bindgen::prelude::wasm_bindgen;

#[derive(Serialize)]
struct Cell {
    class: DistClass,
    direction: Direction,
    value: f64,
    case: String,
    attainment: Attainment,
    /// Atoms of the extremal law (or its limit) as `(cum_prob, value)`.
    witness: Option<Vec<(f64, f64)>>,
    limit: bool,
}

#[derive(Serialize)]
struct BoundsDoc {
    regime: Regime,
    cells: Vec<Cell>,
}

#[derive(Serialize)]
struct Curves {
    distortion: Vec<(f64, f64)>,
    dual: Vec<(f64, f64)>,
    convex: Vec<(f64, f64)>,
    concave: Vec<(f64, f64)>,
}

#[derive(Serialize)]
struct SweepRow {
    x: f64,
    /// worst general, worst symmetric, best general, best symmetric
    values: Option<[f64; 4]>,
}

fn to_json<T: Serialize>(r: Result<T, String>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v),
        Err(e) => serde_json::to_string(&serde_json::json!({ "error": e })),
    }
    .expect("plain data serializes")
}

fn solve(params: &GlueVaRParams, spec: &MomentSpec, dir: Direction) -> Result<BoundResult, BoundError> {
    match gluevar_bound(params, spec, dir) {
        Err(BoundError::UnsupportedRegime { .. }) => extreme_generic(&params.distortion(), spec, dir),
        r => r,
    }
}

fn cells(params: &GlueVaRParams, mu: f64, sigma: f64) -> Result<Vec<BoundResult>, String> {
    let mut out = Vec::with_capacity(4);
    for dir in [Direction::Worst, Direction::Best] {
        for class in [DistClass::General, DistClass::Symmetric] {
            let spec = MomentSpec::new(mu, sigma, class).map_err(|e| e.to_string())?;
            out.push(solve(params, &spec, dir).map_err(|e| e.to_string())?);
        }
    }
    Ok(out)
}

/// All four bounds with case labels and extremal atoms.
#[wasm_bindgen]
pub fn bounds(alpha: f64, beta: f64, h1: f64, h2: f64, mu: f64, sigma: f64) -> String {
    to_json((|| {
        let params = GlueVaRParams::new(alpha, beta, h1, h2).map_err(|e| e.to_string())?;
        let cells = cells(&params, mu, sigma)?
            .into_iter()
            .map(|r| {
                let limit = r.witness.is_none() && r.limit_witness.is_some();
                Cell {
                    class: r.case.class,
                    direction: r.case.direction,
                    value: r.value,
                    case: r.case.to_string(),
                    attainment: r.attainment,
                    witness: r.witness.or(r.limit_witness).map(|q| q.pairs()),
                    limit,
                }
            })
            .collect();
        Ok(BoundsDoc { regime: Regime::of(&params), cells })
    })())
}

/// Breakpoints of the distortion, its dual and both envelopes.
#[wasm_bindgen]
pub fn curves(alpha: f64, beta: f64, h1: f64, h2: f64) -> String {
    to_json((|| {
        let d: Distortion = GlueVaRParams::new(alpha, beta, h1, h2).map_err(|e| e.to_string())?.distortion();
        Ok(Curves {
            distortion: d.breakpoints(),
            dual: d.dual().breakpoints(),
            convex: d.convex_envelope().breakpoints(),
            concave: d.concave_envelope().breakpoints(),
        })
    })())
}

/// The four bounds along a grid of one parameter. Grid points outside the
/// valid region give `values: null`.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn sweep(
    alpha: f64,
    beta: f64,
    h1: f64,
    h2: f64,
    mu: f64,
    sigma: f64,
    axis: &str,
    from: f64,
    to: f64,
    steps: u32,
) -> String {
    to_json((|| {
        if steps < 2 {
            return Err("steps must be at least 2".to_string());
        }
        let mut rows = Vec::with_capacity(steps as usize);
        for i in 0..steps {
            let x = from + (to - from) * f64::from(i) / f64::from(steps - 1);
            let (mut a, mut b, mut g1, mut g2, mut m, mut s) = (alpha, beta, h1, h2, mu, sigma);
            match axis {
                "alpha" => a = x,
                "beta" => b = x,
                "h1" => g1 = x,
                "h2" => g2 = x,
                "mu" => m = x,
                "sigma" => s = x,
                _ => return Err(format!("unknown axis {axis:?}")),
            }
            let values = GlueVaRParams::new(a, b, g1, g2)
                .ok()
                .and_then(|p| cells(&p, m, s).ok())
                .map(|c| [c[0].value, c[1].value, c[2].value, c[3].value]);
            rows.push(SweepRow { x, values });
        }
        Ok(rows)
    })())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn parse(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn bounds_cells_are_ordered() {
        let doc = parse(bounds(0.95, 0.99, 0.3, 0.8, 0.0, 1.0));
        let cells = doc["cells"].as_array().unwrap();
        assert_eq!(cells.len(), 4);
        assert!((cells[0]["value"].as_f64().unwrap() - 4.5).abs() < 1e-12);
        assert_eq!(cells[0]["case"], "W-G-ii");
        assert_eq!(cells[1]["class"], "symmetric");
        assert_eq!(cells[2]["direction"], "best");
        let w = cells[0]["witness"].as_array().unwrap();
        assert_eq!(w.last().unwrap()[0], 1.0);
    }

    #[test]
    fn straddle_uses_the_generic_engine() {
        let doc = parse(bounds(0.3, 0.7, 0.2, 0.6, 0.0, 1.0));
        assert_eq!(doc["regime"], "straddle");
        assert_eq!(doc["cells"][1]["case"], "generic");
    }

    #[test]
    fn invalid_input_reports_an_error() {
        assert!(parse(bounds(0.9, 0.8, 0.1, 0.2, 0.0, 1.0))["error"].is_string());
        assert!(parse(bounds(0.5, 0.8, 0.1, 0.2, 0.0, -1.0))["error"].is_string());
        assert!(parse(sweep(0.5, 0.8, 0.1, 0.2, 0.0, 1.0, "gamma", 0.0, 1.0, 3))["error"].is_string());
    }

    #[test]
    fn curves_include_both_sides_of_the_jump() {
        let doc = parse(curves(0.9, 0.9, 0.1, 0.1));
        let h = doc["distortion"].as_array().unwrap();
        let at_jump: Vec<_> = h.iter().filter(|p| (p[0].as_f64().unwrap() - 0.1).abs() < 1e-12).collect();
        assert_eq!(at_jump.len(), 2);
        assert_eq!(doc["concave"].as_array().unwrap().last().unwrap()[1], 1.0);
    }

    #[test]
    fn sweep_marks_invalid_points() {
        let doc = parse(sweep(0.5, 0.8, 0.1, 0.2, 0.0, 1.0, "beta", 0.4, 0.9, 6));
        let rows = doc.as_array().unwrap();
        assert_eq!(rows.len(), 6);
        assert!(rows[0]["values"].is_null());
        let last = rows[5]["values"].as_array().unwrap();
        assert!(last[0].as_f64().unwrap() >= last[2].as_f64().unwrap());
    }
}
