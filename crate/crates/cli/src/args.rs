use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fbdiff::schemes::SchemeKind;

#[derive(Debug, Parser)]
#[command(name = "fbdiff", version, about = "Forward-backward diffusion experiments (CSV output)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample the exact self-similar Riemann solution.
    Exact(ExactArgs),
    /// Run one scheme from Riemann data.
    Simulate(SimulateArgs),
    /// Eigenvalues of the Neumann Laplacian, its reduced form, or the defect matrix.
    Spectrum(SpectrumArgs),
    /// Error sweep over h or dt against the exact solution.
    Converge(ConvergeArgs),
    /// Interface trajectories of the explicit and two-phase schemes against the exact one.
    CompareInterface(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scheme {
    Explicit,
    Implicit,
    TwoPhase,
}

impl From<Scheme> for SchemeKind {
    fn from(s: Scheme) -> Self {
        match s {
            Scheme::Explicit => SchemeKind::Explicit,
            Scheme::Implicit => SchemeKind::Implicit,
            Scheme::TwoPhase => SchemeKind::TwoPhase,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    pub uminus: f64,
    #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
    pub uplus: f64,
    #[arg(long, default_value_t = 0.5)]
    pub x0: f64,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Grid of 2^J + 1 points (h = 2^-J).
    #[arg(long, conflicts_with = "grid")]
    pub j_exp: Option<u32>,
    /// Number of grid points.
    #[arg(long)]
    pub grid: Option<usize>,
}

impl GridArgs {
    pub fn points(&self, default_exp: u32) -> usize {
        match (self.grid, self.j_exp) {
            (Some(n), _) => n,
            (None, Some(j)) => fbdiff::grid::points_for_exponent(j),
            (None, None) => fbdiff::grid::points_for_exponent(default_exp),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value_t = 0.05)]
    pub t_final: f64,
    /// Number of equispaced sample points on [0, 1].
    #[arg(long, default_value_t = 512)]
    pub samples: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    /// Final profile: j, x, u, phi.
    Final,
    /// Decimated snapshots in long format: t, j, x, u, phi.
    Snapshots,
    /// Per-step interface series.
    Interface,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = Scheme::Explicit)]
    pub scheme: Scheme,
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
    #[command(flatten)]
    pub grid: GridArgs,
    /// dt = 2^-K.
    #[arg(long, conflicts_with = "dt")]
    pub k_exp: Option<u32>,
    /// Time step (default h^2/4).
    #[arg(long)]
    pub dt: Option<f64>,
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value_t = 0.005)]
    pub t_final: f64,
    /// Disable the explicit-scheme CFL check.
    #[arg(long)]
    pub no_cfl_guard: bool,
    #[arg(long, value_enum, default_value_t = Emit::Final)]
    pub emit: Emit,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MatrixKind {
    /// Neumann Laplacian A.
    A,
    /// A with the two interface cells eliminated.
    AHat,
    /// Defect matrix B = A D.
    B,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long, value_enum, default_value_t = MatrixKind::A)]
    pub matrix: MatrixKind,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Defect index L for B, interface index j* for A-hat (1-based).
    #[arg(long)]
    pub index: Option<usize>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Vary {
    H,
    Dt,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[arg(long, value_enum, default_value_t = Scheme::Explicit)]
    pub scheme: Scheme,
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
    #[arg(long, value_enum, default_value_t = Vary::H)]
    pub vary: Vary,
    /// First exponent of the sweep.
    #[arg(long)]
    pub from: u32,
    /// Last exponent of the sweep (inclusive).
    #[arg(long)]
    pub to: u32,
    /// Fixed space exponent when varying dt.
    #[arg(long)]
    pub j_exp: Option<u32>,
    /// Fixed time exponent when varying h (default dt = h^2/4).
    #[arg(long)]
    pub k_exp: Option<u32>,
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value_t = 0.05)]
    pub t_final: f64,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 0.05)]
    pub t_final: f64,
    #[command(flatten)]
    pub out: OutArgs,
}
