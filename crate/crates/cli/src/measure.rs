//! Parsing of `--measure` and parameter sweeps over it.

use std::fmt;
use std::str::FromStr;

use gluevar_core::{GlueVaRParams, SpecialKind};

/// A risk measure given on the command line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Measure {
    GlueVaR(GlueVaRParams),
    Special {
        kind: SpecialKind,
        alpha: f64,
        beta: Option<f64>,
    },
}

fn numbers(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>().map_err(|_| format!("'{t}' is not a number"))
        })
        .collect()
}

impl FromStr for Measure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, rest) = s
            .split_once(':')
            .ok_or_else(|| format!("expected <name>:<params>, got '{s}'"))?;
        let v = numbers(rest)?;
        let arity = |n: usize| {
            if v.len() == n {
                Ok(())
            } else {
                Err(format!("{name} takes {n} parameter(s), got {}", v.len()))
            }
        };
        let m = match name.trim().to_ascii_lowercase().as_str() {
            "gluevar" => {
                arity(4)?;
                Measure::GlueVaR(GlueVaRParams::new(v[0], v[1], v[2], v[3]).map_err(|e| e.to_string())?)
            }
            "var" | "tvar" => {
                arity(1)?;
                let kind = if name.eq_ignore_ascii_case("var") { SpecialKind::Var } else { SpecialKind::Tvar };
                Measure::Special {
                    kind,
                    alpha: v[0],
                    beta: None,
                }
            }
            "rvar" => {
                arity(2)?;
                Measure::Special {
                    kind: SpecialKind::Rvar,
                    alpha: v[0],
                    beta: Some(v[1]),
                }
            }
            other => return Err(format!("unknown measure '{other}' (expected gluevar, var, tvar or rvar)")),
        };
        m.params()?;
        Ok(m)
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Measure::GlueVaR(p) => write!(f, "gluevar:{},{},{},{}", p.alpha, p.beta, p.h1, p.h2),
            Measure::Special {
                kind: SpecialKind::Rvar,
                alpha,
                beta,
            } => write!(f, "rvar:{},{}", alpha, beta.unwrap_or(f64::NAN)),
            Measure::Special { kind, alpha, .. } => {
                let name = if *kind == SpecialKind::Var { "var" } else { "tvar" };
                write!(f, "{name}:{alpha}")
            }
        }
    }
}

impl Measure {
    pub fn params(&self) -> Result<GlueVaRParams, String> {
        match *self {
            Measure::GlueVaR(p) => Ok(p),
            Measure::Special { kind, alpha, beta } => {
                GlueVaRParams::special(kind, alpha, beta).map_err(|e| e.to_string())
            }
        }
    }

    /// The same measure with one parameter replaced.
    pub fn with_param(&self, axis: Axis, value: f64) -> Result<Measure, String> {
        let m = match (*self, axis) {
            (Measure::GlueVaR(p), _) => {
                let mut q = p;
                match axis {
                    Axis::Alpha => q.alpha = value,
                    Axis::Beta => q.beta = value,
                    Axis::H1 => q.h1 = value,
                    Axis::H2 => q.h2 = value,
                    Axis::Mu | Axis::Sigma => {}
                }
                Measure::GlueVaR(GlueVaRParams::new(q.alpha, q.beta, q.h1, q.h2).map_err(|e| e.to_string())?)
            }
            (Measure::Special { kind, beta, .. }, Axis::Alpha) => Measure::Special {
                kind,
                alpha: value,
                beta,
            },
            (Measure::Special {
                kind: SpecialKind::Rvar,
                alpha,
                ..
            }, Axis::Beta) => Measure::Special {
                kind: SpecialKind::Rvar,
                alpha,
                beta: Some(value),
            },
            (m, Axis::Mu | Axis::Sigma) => m,
            (m, axis) => return Err(format!("{axis} is fixed for {m}")),
        };
        m.params()?;
        Ok(m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Axis {
    Alpha,
    Beta,
    H1,
    H2,
    Mu,
    Sigma,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::Alpha => "alpha",
            Axis::Beta => "beta",
            Axis::H1 => "h1",
            Axis::H2 => "h2",
            Axis::Mu => "mu",
            Axis::Sigma => "sigma",
        })
    }
}
