use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "pseudocone",
    version,
    about = "Pseudo-cones, dual curvature measures and the dual Minkowski problem"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dimension, solid angle, dual cone and distance bound of a cone.
    ConeInfo(ConeInfoArgs),
    /// Quadrature nodes and weights as CSV.
    Grid(GridCmdArgs),
    /// Build a pseudo-cone from facets, at random, or by translating the cone.
    Make(MakeArgs),
    /// Radial function and Gauss map at every grid node, as CSV.
    Eval(EvalArgs),
    /// Radial or dual curvature measure of a pseudo-cone.
    Measure(MeasureArgs),
    /// Dual volume of a pseudo-cone.
    DualVolume(DualVolumeArgs),
    /// Compare the exact derivative of J_G with central differences.
    CheckDerivative(CheckDerivativeArgs),
    /// Solve the discrete dual Minkowski problem.
    Solve(SolveArgs),
    /// Random pseudo-cone -> dual curvature -> solve -> compare.
    Roundtrip(RoundtripArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Midpoint,
    Fibonacci,
    Random,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Target number of quadrature nodes.
    #[arg(long = "grid-n", env = "PSCONE_GRID_N", default_value_t = 100_000)]
    pub grid_n: usize,
    /// Node placement; defaults to midpoint in the plane and fibonacci in space.
    #[arg(long)]
    pub scheme: Option<SchemeArg>,
    /// Seed for the random scheme.
    #[arg(long = "grid-seed", default_value_t = 0)]
    pub grid_seed: u64,
}

#[derive(Debug, Args)]
pub struct ConeInfoArgs {
    #[arg(long)]
    pub cone: PathBuf,
    /// Index used for the distance bound.
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    pub q: f64,
    /// Also estimate the solid angle from this many random directions.
    #[arg(long, requires = "seed")]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GridCmdArgs {
    #[arg(long)]
    pub cone: PathBuf,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["facets", "random", "translate"])))]
pub struct MakeArgs {
    #[arg(long)]
    pub cone: PathBuf,
    /// JSON array of `{"u": [..], "hbar": h}`.
    #[arg(long)]
    pub facets: Option<PathBuf>,
    /// Number of random facets; needs `--seed`.
    #[arg(long, requires = "seed")]
    pub random: Option<usize>,
    /// Translation vector `z` for `C + z`, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub translate: Option<Vec<f64>>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub pseudocone: PathBuf,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureKind {
    /// `μ_{F,K}` for the chosen decay pair.
    Radial,
    /// `C̃_q(K, ·)`.
    Curvature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DecayArg {
    Power,
    Exponential,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[arg(long)]
    pub pseudocone: PathBuf,
    #[arg(long, value_enum, default_value_t = MeasureKind::Curvature)]
    pub kind: MeasureKind,
    #[arg(long, value_enum, default_value_t = DecayArg::Power)]
    pub decay: DecayArg,
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    pub q: f64,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the atoms as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DualVolumeArgs {
    #[arg(long)]
    pub pseudocone: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    pub q: f64,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("direction").required(true).args(["g", "seed"])))]
pub struct CheckDerivativeArgs {
    #[arg(long)]
    pub pseudocone: PathBuf,
    #[arg(long, value_enum, default_value_t = DecayArg::Power)]
    pub decay: DecayArg,
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    pub q: f64,
    /// Perturbation values, one per facet.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub g: Option<Vec<f64>>,
    /// Draw the perturbation uniformly from `[-1, 1]`.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_delimiter = ',', default_value = "1e-3,1e-4,1e-5")]
    pub t: Vec<f64>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub q: f64,
    /// Gradient tolerance.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long = "max-iter", default_value_t = 10_000)]
    pub max_iter: usize,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub cone: PathBuf,
    #[arg(long)]
    pub measure: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Solution pseudo-cone; the result and trace go next to it.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RoundtripArgs {
    #[arg(long)]
    pub cone: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub facets: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-2)]
    pub threshold: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Directory for the generated pseudo-cone, target, solution and trace.
    #[arg(long = "out-dir")]
    pub out_dir: Option<PathBuf>,
}
