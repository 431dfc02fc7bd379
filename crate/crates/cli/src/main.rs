mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "specset", version, about = "K-spectral set constants for dense complex matrices")]
struct Cli {
    /// Worker threads for the parallel loops.
    #[arg(long, global = true, env = "SPECSET_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Upper bounds on K for a region: report.json, trace.csv, boundary.csv.
    Bounds(BoundsArgs),
    /// Norms of e^{tA} or A^k against K for the clipped numerical range.
    Transient(TransientArgs),
    /// Rank-one structure maps of the resolvent over a window.
    Rankone(RankoneArgs),
    /// Blaschke-product lower bound on K.
    Optimal(OptimalArgs),
    /// Writes a gallery matrix in Matrix Market format.
    Gallery(GalleryArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct MatrixArgs {
    /// Gallery matrix, e.g. grcar:32, block:fig4, jordan:4:0, normal:diag(1,i), rankone:8:0.01.
    #[arg(long, conflicts_with = "matrix", required_unless_present = "matrix")]
    pub gallery: Option<String>,

    /// Matrix Market file (an `mm:` prefix is accepted).
    #[arg(long)]
    pub matrix: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CommonArgs {
    /// Output directory.
    #[arg(long, default_value = "specset-out")]
    pub out: PathBuf,

    /// Tolerance on ||S(1, A) - 2I||.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,

    /// Points per axis of the pseudospectrum scan.
    #[arg(long, default_value_t = 300)]
    pub grid: usize,

    /// Normal angles sampled on the numerical range boundary.
    #[arg(long, default_value_t = 512)]
    pub angles: usize,

    /// Include wall-clock timings in report.json (makes output run-dependent).
    #[arg(long)]
    pub timings: bool,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub matrix: MatrixArgs,
    /// Region flag (numerical_range, wminus:disk@3.5:numrad, pseudospectrum:1e-3, ...),
    /// inline JSON, or a path to a .json spec.
    #[arg(long)]
    pub region: String,
    /// Also run the Blaschke lower bound (simply connected regions only).
    #[arg(long)]
    pub lower: bool,
    /// Record w(R) at each node in trace.csv.
    #[arg(long)]
    pub trace_numrad: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// ||e^{tA}|| against W(A) clipped to Re z <= 0.
    Exp,
    /// ||A^k|| against W(A) clipped to the unit disk.
    Power,
}

#[derive(Args, Debug)]
pub struct TransientArgs {
    #[command(flatten)]
    pub matrix: MatrixArgs,
    #[arg(long, value_enum, default_value = "exp")]
    pub mode: Mode,
    #[arg(long, default_value_t = 20.0)]
    pub t_max: f64,
    /// Number of t intervals on [0, t_max].
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    #[arg(long, default_value_t = 100)]
    pub k_max: u32,
    /// Override the companion region.
    #[arg(long)]
    pub region: Option<String>,
    #[arg(long)]
    pub lower: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct RankoneArgs {
    #[command(flatten)]
    pub matrix: MatrixArgs,
    /// `re_min,re_max,im_min,im_max`, or `grcar` for [-1,3]x[-3,3].
    #[arg(long)]
    pub window: String,
    #[arg(long, default_value_t = 100)]
    pub resolution: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct OptimalArgs {
    #[command(flatten)]
    pub matrix: MatrixArgs,
    #[arg(long)]
    pub region: String,
    /// Blaschke degree; defaults to min(n - 1, 8).
    #[arg(long)]
    pub degree: Option<usize>,
    #[arg(long, default_value_t = 20)]
    pub starts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 2000)]
    pub max_iters: u64,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug)]
pub struct GalleryArgs {
    pub spec: String,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A result that fails a consistency check the library cannot see.
#[derive(Debug)]
pub struct NumericalFailure(pub String);

impl std::fmt::Display for NumericalFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for NumericalFailure {}

/// Exit status for a failed run: 2 when the region could not be built,
/// 3 for numerical failures, 1 otherwise.
fn exit_code(err: &anyhow::Error) -> u8 {
    use specset::{Error, LinalgError, MapError, PathError, RegionError};
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                e if e.is_region() => 2,
                Error::Linalg(_) | Error::Path(_) | Error::Map(_) => 3,
                _ => 1,
            };
        }
        if cause.is::<RegionError>() {
            return 2;
        }
        if cause.is::<LinalgError>() || cause.is::<PathError>() || cause.is::<MapError>() || cause.is::<NumericalFailure>() {
            return 3;
        }
    }
    1
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .context("configuring the thread pool")?;
    }
    let threads = rayon::current_num_threads();
    match cli.command {
        Command::Bounds(args) => commands::bounds(args, threads),
        Command::Transient(args) => commands::transient(args, threads),
        Command::Rankone(args) => commands::rankone(args, threads),
        Command::Optimal(args) => commands::optimal(args, threads),
        Command::Gallery(args) => commands::gallery(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
