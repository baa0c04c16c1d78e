//! Sharp bounds on GlueVaR distortion risk measures under mean and variance
//! constraints, with optional symmetry.
//!
//! The crate computes the best- and worst-case value of a distortion risk
//! measure over all loss distributions with a given mean `μ` and standard
//! deviation `σ`, and builds the distributions that attain them. GlueVaR and
//! its special cases (VaR, TVaR, RVaR) have closed forms in [`bounds`]; any
//! other piecewise-linear distortion goes through [`bounds::extreme_generic`].
//! The [`oracle`] module recomputes every bound by a discretized isotonic
//! projection that shares no code with the envelope path.
//!
//! ```
//! use gluevar_core::{GlueVaRParams, MomentSpec, Direction, bounds};
//!
//! let params = GlueVaRParams::new(0.95, 0.99, 0.3, 0.8).unwrap();
//! let spec = MomentSpec::general(0.0, 1.0).unwrap();
//! let worst = bounds::gluevar_bound(&params, &spec, Direction::Worst).unwrap();
//! assert!((worst.value - 4.5).abs() < 1e-12);
//! ```

pub mod bounds;
pub mod choquet;
pub mod distortion;
pub mod hull;
pub mod level;
pub mod oracle;
pub mod plf;
pub mod step;

pub use bounds::{Attainment, BoundError, BoundResult, CaseId, CaseLabel, Direction, Regime};
pub use choquet::{DistClass, MomentSpec, StepQuantile};
pub use distortion::{Distortion, DistortionError, GlueVaRParams, Side, SlopeTriple, SpecialKind};
pub use level::Level;
pub use step::StepFunction;
