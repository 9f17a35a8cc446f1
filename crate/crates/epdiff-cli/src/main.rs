//! `epdiff`: experiments with the spectral Euler-Arnold solver on the
//! circle. Subcommands: simulate, verify, sweep, decompose.
//!
//! Exit codes: 0 success / clean horizon, 1 configuration or verification
//! failure, 2 blow-up verdict from a simulation.
//!
//! The EPDIFF_THREADS environment variable bounds the worker pool used by
//! sweeps and verification batches (default: logical cores).

mod commands;
mod config;
mod output;

use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "epdiff", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the flow for one operator and write diagnostics.
    Simulate(SimulateArgs),
    /// Run estimate-verification suites on the fixed-seed corpus.
    Verify(VerifyArgs),
    /// Sweep the metric order and tabulate blow-up verdicts.
    Sweep(SweepArgs),
    /// Certify an operator and print its expansion coefficients.
    Decompose(DecomposeArgs),
}

#[derive(clap::Args)]
pub struct SimulateArgs {
    /// Operator name, `sobolev` (with --s), or a CSV symbol table.
    #[arg(long)]
    pub operator: Option<String>,
    /// Operator order for the sobolev family: symbol (1+k^2)^{s/2}.
    #[arg(long)]
    pub s: Option<f64>,
    /// Claimed order for a tabulated symbol (estimated if absent).
    #[arg(long, allow_negative_numbers = true)]
    pub order: Option<f64>,
    /// Bandwidth (highest retained mode).
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long)]
    pub cfl: Option<f64>,
    #[arg(long)]
    pub dt_max: Option<f64>,
    /// Fixed time step (overrides the CFL policy).
    #[arg(long)]
    pub dt: Option<f64>,
    /// Horizon.
    #[arg(long = "T")]
    pub t: Option<f64>,
    /// Initial condition: sin, minus_sin, random:p:seed, or a JSON file.
    #[arg(long)]
    pub u0: Option<String>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Snapshot cadence in steps (default: ~200 snapshots per run).
    #[arg(long)]
    pub snapshot_every: Option<usize>,
    /// Run degenerate operators with the projected quotient inverse.
    #[arg(long)]
    pub allow_degenerate: bool,
    /// Skip the dt/N refinement probes on suspected blow-up.
    #[arg(long)]
    pub no_probes: bool,
    /// Flat TOML config file mirroring these flags (flags win).
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum SuiteArg {
    LemmaA,
    LemmaB,
    LemmaC,
    LemmaD,
    QDecomposition,
    Gronwall,
    All,
}

#[derive(clap::Args)]
pub struct VerifyArgs {
    /// Which suite to run.
    #[arg(value_enum)]
    pub suite: SuiteArg,
    #[arg(long)]
    pub operator: Option<String>,
    #[arg(long)]
    pub s: Option<f64>,
    /// Order of the standalone multiplier B = op((1+m^2)^{order/2}) for the
    /// embedding check (default: A^{-1}D from the operator).
    #[arg(long, allow_negative_numbers = true)]
    pub order: Option<f64>,
    /// Claimed order for a tabulated symbol.
    #[arg(long = "symbol-order", allow_negative_numbers = true)]
    pub order_custom: Option<f64>,
    /// Corpus bandwidth.
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Corpus size.
    #[arg(long)]
    pub fields: Option<usize>,
    /// Include coordinate-ascent adversarial fields (default true).
    #[arg(long)]
    pub adversarial: Option<bool>,
    /// Trajectory horizon for the integral certificate suite.
    #[arg(long = "T")]
    pub t: Option<f64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(clap::Args)]
pub struct SweepArgs {
    /// Lowest metric order (inertia operator order is 2s).
    #[arg(long)]
    pub s_min: Option<f64>,
    /// Highest metric order.
    #[arg(long)]
    pub s_max: Option<f64>,
    /// Number of sweep rows.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long = "T")]
    pub t: Option<f64>,
    #[arg(long)]
    pub u0: Option<String>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(clap::Args)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub operator: Option<String>,
    #[arg(long)]
    pub s: Option<f64>,
    /// Claimed order for a tabulated symbol.
    #[arg(long, allow_negative_numbers = true)]
    pub order: Option<f64>,
    /// Expansion depth (number of coefficients).
    #[arg(long)]
    pub depth: Option<usize>,
    /// Fit / residual-check bandwidth.
    #[arg(long = "K")]
    pub k: Option<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("EPDIFF_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .ok();
        }
    }
    // usage problems are configuration errors: report them on exit code 1
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    let outcome = match cli.command {
        Command::Simulate(args) => commands::simulate(args),
        Command::Verify(args) => commands::verify_cmd(args),
        Command::Sweep(args) => commands::sweep(args),
        Command::Decompose(args) => commands::decompose(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
