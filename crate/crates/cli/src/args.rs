use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "slrf",
    about = "Axisymmetric Ricci flow on S^2: smooth-lattice and finite-difference solvers",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a flow and emit snapshots, diagnostics and embeddings.
    Run(RunArgs),
    /// Compare the embedded generating curves of two or more runs at their
    /// common snapshot times.
    Compare(CompareArgs),
    /// Solve one ladder cell perturbatively and print the coordinates and
    /// residuals.
    CellCheck(CellCheckArgs),
}

#[derive(Debug, Args, Default, Clone)]
pub struct RunArgs {
    /// Initial-data preset: sphere, single-dumbbell or double-dumbbell.
    #[arg(long)]
    pub preset: Option<String>,

    /// Key=value config file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Output directory (created if missing).
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Solver: slrf-v1, slrf-v2 or fd.
    #[arg(long)]
    pub method: Option<String>,

    /// Resolution: rail segments (lattice) or grid points (fd).
    #[arg(long)]
    pub n: Option<usize>,

    #[arg(long)]
    pub c3: Option<f64>,

    #[arg(long)]
    pub c5: Option<f64>,

    /// Azimuthal opening angle of the ladder, radians.
    #[arg(long)]
    pub delta_theta: Option<f64>,

    #[arg(long)]
    pub courant_factor: Option<f64>,

    /// paper-literal or courant-squared.
    #[arg(long)]
    pub timestep_mode: Option<String>,

    #[arg(long)]
    pub ghost_depth: Option<usize>,

    #[arg(long)]
    pub interp_start: Option<usize>,

    /// Steps between regrids (lattice) / reparametrizations (fd); 0 disables.
    #[arg(long)]
    pub regrid_every: Option<usize>,

    /// Stop once dt has dropped below its initial value by this factor.
    #[arg(long)]
    pub stop_factor: Option<f64>,

    /// Steps between snapshots; 0 leaves the time-based cadence in charge.
    #[arg(long)]
    pub snapshot_every: Option<usize>,

    /// Number of uniformly spaced snapshot times up to the extinction time.
    #[arg(long)]
    pub snapshot_count: Option<usize>,

    #[arg(long)]
    pub max_steps: Option<usize>,

    /// Seed the initial Ricci scalars from the rung lengths.
    #[arg(long)]
    pub seed_r_from_legs: Option<bool>,

    /// ftcs or rk4 (fd method only).
    #[arg(long)]
    pub fd_scheme: Option<String>,

    /// Fixed time step for the fd method.
    #[arg(long)]
    pub fd_dt: Option<f64>,

    /// Embeddability tolerance, relative to the local leg scale.
    #[arg(long)]
    pub tol_embed: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Two or more run directories.
    #[arg(required = true, num_args = 2..)]
    pub dirs: Vec<PathBuf>,

    /// Snapshot times closer than this count as common.
    #[arg(long, default_value_t = 1e-3)]
    pub time_tol: f64,

    /// Optional CSV report destination.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CellCheckArgs {
    #[arg(long)]
    pub l_xo: f64,
    #[arg(long)]
    pub l_xp: f64,
    #[arg(long)]
    pub l_xm: f64,
    #[arg(long)]
    pub ds_p: f64,
    #[arg(long)]
    pub ds_m: f64,
    #[arg(long)]
    pub ricci: f64,
}
