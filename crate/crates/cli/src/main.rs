//! `chei2d` command-line interface.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 non-convergence warning
//! (outputs are still written).

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser, Clone)]
#[command(
    name = "chei2d",
    version,
    about = "PageRank/CheiRank analysis of directed networks"
)]
pub struct Cli {
    /// Worker threads; results do not depend on this value.
    #[arg(long, global = true, env = "CHEI2D_THREADS")]
    pub threads: Option<usize>,

    /// Seed for every random choice (synthetic graphs).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Clone)]
pub enum Command {
    /// PageRank and CheiRank table.
    Rank(RankArgs),
    /// Correlator κ(τ), κ_i histogram and point count Δ(n).
    Stats(StatsArgs),
    /// Density W(K, K*) on a square grid.
    Density(DensityArgs),
    /// Information-flow field on the (K, K*) plane.
    Flow(FlowArgs),
    /// Link-inversion filter: fraction curve and filtered CheiRank.
    Filter(FilterArgs),
    /// Coarse-grained Google matrix in PageRank order.
    Matrix(MatrixArgs),
    /// 2DRank order and subset-local ranks.
    Twod(TwodArgs),
    /// Generate a synthetic edge list.
    Synth(SynthArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Args, Clone)]
pub struct GraphArgs {
    /// Edge-list file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = chei2d::google::DEFAULT_ALPHA)]
    pub alpha: f64,
    #[arg(long, default_value_t = chei2d::google::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = chei2d::google::DEFAULT_MAX_ITER)]
    pub max_iter: usize,
    /// Use the third edge-list column as link weight.
    #[arg(long)]
    pub weighted: bool,
    #[arg(long)]
    pub drop_self_loops: bool,
}

#[derive(Debug, Args, Clone)]
pub struct OutArgs {
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Clone)]
pub struct RankArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args, Clone)]
pub struct StatsArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Rank table written by `rank`; used instead of recomputing.
    #[arg(long, conflicts_with = "input")]
    pub ranks: Option<PathBuf>,
    #[arg(long, default_value_t = -100, allow_hyphen_values = true)]
    pub tau_min: i64,
    #[arg(long, default_value_t = 100, allow_hyphen_values = true)]
    pub tau_max: i64,
    #[arg(long, default_value_t = chei2d::stats::HISTOGRAM_BINS)]
    pub bins: usize,
    #[arg(long, default_value_t = chei2d::stats::HISTOGRAM_LO)]
    pub hist_lo: f64,
    #[arg(long, default_value_t = chei2d::stats::HISTOGRAM_HI)]
    pub hist_hi: f64,
    /// Number of log-spaced n values for Δ(n).
    #[arg(long, default_value_t = 100)]
    pub delta_samples: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ScaleArg {
    Linear,
    Log,
}

impl From<ScaleArg> for chei2d::Scale {
    fn from(s: ScaleArg) -> Self {
        match s {
            ScaleArg::Linear => chei2d::Scale::Linear,
            ScaleArg::Log => chei2d::Scale::Log,
        }
    }
}

#[derive(Debug, Args, Clone)]
pub struct DensityArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, conflicts_with = "input")]
    pub ranks: Option<PathBuf>,
    #[arg(long, default_value_t = chei2d::stats::DENSITY_CELLS)]
    pub cells: usize,
    #[arg(long, value_enum, default_value_t = ScaleArg::Log)]
    pub scale: ScaleArg,
    /// Also write the grid divided by integer points per cell.
    #[arg(long)]
    pub per_lattice_point: bool,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args, Clone)]
pub struct FlowArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, default_value_t = chei2d::stats::DENSITY_CELLS)]
    pub cells: usize,
    #[arg(long, value_enum, default_value_t = ScaleArg::Log)]
    pub scale: ScaleArg,
    /// Divide by links leaving the cell instead of nodes in it.
    #[arg(long)]
    pub per_link: bool,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args, Clone)]
pub struct FilterArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Probability filter threshold η for the filtered CheiRank.
    #[arg(long, conflicts_with_all = ["eta_k", "eta_inf"])]
    pub eta: Option<String>,
    /// Rank filter threshold η_K for the filtered CheiRank.
    #[arg(long, conflicts_with = "eta_inf")]
    pub eta_k: Option<String>,
    /// Invert every link (η = ∞).
    #[arg(long)]
    pub eta_inf: bool,
    /// Thresholds for the fraction curve (comma separated, `inf` allowed).
    #[arg(long, value_delimiter = ',', default_value = "0,0.1,1,10,100,1000,inf")]
    pub etas: Vec<String>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args, Clone)]
pub struct MatrixArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, default_value_t = chei2d::stats::MATRIX_CELLS)]
    pub cells: usize,
    #[arg(long, default_value_t = chei2d::stats::MATRIX_RAW_WINDOW)]
    pub raw_window: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args, Clone)]
pub struct TwodArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, conflicts_with = "input")]
    pub ranks: Option<PathBuf>,
    /// File with one node id per line.
    #[arg(long)]
    pub subset: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Model {
    ScaleFree,
    Random,
}

#[derive(Debug, Args, Clone)]
pub struct SynthArgs {
    #[arg(long, value_enum, default_value_t = Model::ScaleFree)]
    pub model: Model,
    #[arg(long)]
    pub nodes: usize,
    #[arg(long, default_value_t = 2.1)]
    pub mu_in: f64,
    #[arg(long, default_value_t = 2.7)]
    pub mu_out: f64,
    #[arg(long, default_value_t = 3)]
    pub min_degree: usize,
    /// Link draws for the random model.
    #[arg(long)]
    pub links: Option<usize>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args, Clone)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Write to this directory instead of the recorded one.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Result of a successful command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Clean,
    NotConverged,
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli, &argv[1..]) {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::NotConverged) => {
            eprintln!("warning: power iteration did not reach the tolerance; outputs written");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
