//! `sobker`: kernel tables, oracle checks, embedding constants, QMC errors
//! and kernel interpolation from the command line.

mod commands;
mod config;
mod family;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};

use family::{DensityArgs, FamilyArgs};

/// Exit codes.
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_CONSISTENCY: u8 = 3;
pub const EXIT_NUMERICAL: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "sobker", version, about = "Reproducing kernels of Sobolev spaces on R^d")]
pub struct Cli {
    /// TOML file of key = value defaults; flags on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Evaluate or tabulate a kernel.
    #[command(subcommand)]
    Kernel(KernelCmd),
    /// Embedding-constant bounds.
    Embed(EmbedArgs),
    /// Worst-case error of an equal-weight rule on given points.
    Wce(WceArgs),
    /// Best of several random point sets.
    Search(SearchArgs),
    /// Information-complexity bounds.
    Complexity(ComplexityArgs),
    /// Minimal-norm interpolation of scattered data.
    Recover(RecoverArgs),
}

#[derive(Debug, Subcommand)]
pub enum KernelCmd {
    /// K(x, t) at one pair of points.
    Eval(EvalArgs),
    /// CSV of r, K(r e_1, 0) on an equispaced grid.
    Table(TableArgs),
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub x: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub t: Vec<f64>,
    /// Also evaluate the Fourier-integral oracle and compare.
    #[arg(long)]
    pub oracle: bool,
    /// Allowed |closed form - oracle|.
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    /// Oracle: panels per unit length.
    #[arg(long, default_value_t = 8)]
    pub panels_per_unit: usize,
    /// Oracle: Gauss-Legendre nodes per panel.
    #[arg(long, default_value_t = 16)]
    pub gauss_order: usize,
    /// Oracle: fixed truncation half-width instead of the automatic one.
    #[arg(long)]
    pub truncation_radius: Option<f64>,
    /// Oracle: absolute error target.
    #[arg(long, default_value_t = 1e-10)]
    pub target_abs_tol: f64,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long)]
    pub rmax: f64,
    #[arg(long)]
    pub step: f64,
}

#[derive(Debug, Args)]
#[command(args_conflicts_with_subcommands = true)]
pub struct EmbedArgs {
    /// Range of dimensions a:b, inclusive.
    #[arg(long, default_value = "1:30")]
    pub d_range: String,
    #[command(subcommand)]
    pub radial: Option<EmbedCmd>,
}

#[derive(Debug, Subcommand)]
pub enum EmbedCmd {
    /// Upper bound on the embedding norm of H^s(R^d).
    Radial {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        s: f64,
        /// Decay parameter, at most 2s - d (the default).
        #[arg(long)]
        beta: Option<f64>,
    },
}

#[derive(Debug, Args)]
pub struct WceArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub density: DensityArgs,
    /// CSV of points, one row per point, with a header row.
    #[arg(long)]
    pub points: PathBuf,
    /// Monte Carlo samples for the representer terms.
    #[arg(long, default_value_t = 100_000)]
    pub mc: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub density: DensityArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, default_value_t = 100_000)]
    pub mc: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Where to write the best point set as CSV.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ComplexityArgs {
    #[arg(long, default_value = "sobolev")]
    pub family: family::Family,
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub weights: Option<family::WeightPreset>,
    #[arg(long, default_value_t = 40)]
    pub truncation: u32,
    #[arg(long)]
    pub eps: f64,
}

#[derive(Debug, Args)]
pub struct RecoverArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// CSV rows x_1..x_d, y.
    #[arg(long)]
    pub data: PathBuf,
    /// CSV rows x_1..x_d of evaluation points.
    #[arg(long)]
    pub probe: PathBuf,
    /// Directory for coefficients.csv, probe_values.csv and summary.json.
    #[arg(long)]
    pub out_dir: PathBuf,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<commands::Inconsistent>().is_some() {
        return EXIT_CONSISTENCY;
    }
    match err.downcast_ref::<sobker::Error>() {
        Some(e) if e.is_numerical() => EXIT_NUMERICAL,
        Some(sobker::Error::Consistency(_)) => EXIT_CONSISTENCY,
        _ => EXIT_USAGE,
    }
}

fn init_threads() -> anyhow::Result<()> {
    let Ok(v) = std::env::var("SOBKER_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| anyhow::anyhow!("SOBKER_THREADS must be a count, got {v:?}"))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let mut root = Cli::command();
    root.build();
    let argv: Vec<String> = std::env::args().collect();
    let run = || -> anyhow::Result<()> {
        init_threads()?;
        let argv = config::merge(&root, argv)?;
        let cli = match Cli::try_parse_from(argv) {
            Ok(cli) => cli,
            Err(e) => e.exit(),
        };
        commands::run(cli)
    };
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
