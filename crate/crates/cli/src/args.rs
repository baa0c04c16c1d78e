use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gluevar_core::{DistClass, Direction};

use crate::measure::{Axis, Measure};

/// Sharp GlueVaR, VaR, TVaR and RVaR bounds from mean and standard deviation.
#[derive(Debug, Parser)]
#[command(name = "gluevar", version)]
pub struct Cli {
    /// Worker threads for verify and sweep (defaults to RAYON_NUM_THREADS or the core count).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Best- and/or worst-case value with its case and intermediate quantities.
    Bound(BoundArgs),
    /// Writes the distribution attaining a bound as a CSV quantile table.
    Extremal(ExtremalArgs),
    /// Cross-checks closed forms against the generic engine, the oracle and random samples.
    Verify(VerifyArgs),
    /// Tabulates all four bounds while one parameter moves along a grid.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ClassArg {
    General,
    Symmetric,
}

impl From<ClassArg> for DistClass {
    fn from(c: ClassArg) -> DistClass {
        match c {
            ClassArg::General => DistClass::General,
            ClassArg::Symmetric => DistClass::Symmetric,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ClassSet {
    General,
    Symmetric,
    Both,
}

impl ClassSet {
    pub fn classes(self) -> Vec<DistClass> {
        match self {
            ClassSet::General => vec![DistClass::General],
            ClassSet::Symmetric => vec![DistClass::Symmetric],
            ClassSet::Both => vec![DistClass::General, DistClass::Symmetric],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Worst,
    Best,
    Both,
}

impl DirectionArg {
    pub fn directions(self) -> Vec<Direction> {
        match self {
            DirectionArg::Worst => vec![Direction::Worst],
            DirectionArg::Best => vec![Direction::Best],
            DirectionArg::Both => vec![Direction::Worst, Direction::Best],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    /// Closed-form case analysis (unavailable for symmetric alpha < 1/2 <= beta).
    Closed,
    /// Envelope construction valid for every tuple.
    Generic,
}

#[derive(Clone, Debug, Args)]
pub struct Moments {
    /// gluevar:ALPHA,BETA,H1,H2 | var:ALPHA | tvar:ALPHA | rvar:ALPHA,BETA
    #[arg(long)]
    pub measure: Measure,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub sigma: f64,
    #[arg(long, value_enum, default_value_t = ClassArg::General)]
    pub class: ClassArg,
}

#[derive(Clone, Debug, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub moments: Moments,
    #[arg(long, value_enum, default_value_t = DirectionArg::Worst)]
    pub direction: DirectionArg,
    #[arg(long, value_enum, default_value_t = Engine::Closed)]
    pub engine: Engine,
    /// Also report the discretized oracle with this many atoms.
    #[arg(long)]
    pub oracle_n: Option<usize>,
}

#[derive(Clone, Debug, Args)]
pub struct ExtremalArgs {
    #[command(flatten)]
    pub moments: Moments,
    #[arg(long, value_enum, default_value_t = DirectionArg::Worst)]
    pub direction: DirectionArg,
    #[arg(long, value_enum, default_value_t = Engine::Closed)]
    pub engine: Engine,
    /// CSV file with columns cum_prob,value.
    #[arg(long)]
    pub out: PathBuf,
    /// Residual report (defaults to the CSV path with extension .residuals.json).
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
    /// When the bound is only approached, write the limiting distribution instead of failing.
    #[arg(long)]
    pub allow_limit: bool,
}

#[derive(Clone, Debug, Args)]
pub struct VerifyArgs {
    /// Verify a single measure instead of a random grid.
    #[arg(long)]
    pub measure: Option<Measure>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub sigma: f64,
    #[arg(long, value_enum, default_value_t = ClassSet::Both)]
    pub class: ClassSet,
    #[arg(long, value_enum, default_value_t = DirectionArg::Both)]
    pub direction: DirectionArg,
    /// Number of random parameter tuples.
    #[arg(long, default_value_t = 10_000)]
    pub tuples: usize,
    #[arg(long, default_value_t = 2_000)]
    pub oracle_n: usize,
    /// Random members of the class evaluated per tuple.
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Check VaR, TVaR and RVaR worst cases on alpha in {0.5, 0.9, 0.95, 0.99}.
    #[arg(long)]
    pub remark_grid: bool,
    /// Negative control: perturb every closed form before checking it.
    #[arg(long, hide = true)]
    pub corrupt_closed_form: bool,
}

#[derive(Clone, Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub measure: Measure,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub sigma: f64,
    #[arg(long, value_enum)]
    pub axis: Axis,
    #[arg(long, allow_negative_numbers = true)]
    pub from: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub to: f64,
    /// Number of grid points, endpoints included.
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
    #[arg(long)]
    pub out: PathBuf,
}
