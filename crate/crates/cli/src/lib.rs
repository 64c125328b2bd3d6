//! `arclaw` — batch experiment runner: define a system, solve for the
//! invariant core measure, extend it over the tails, run trajectory
//! ensembles, and compare them against the closed-form limit laws.
//!
//! Exit codes: 0 pass, 1 statistical-test failure, 2 configuration error,
//! 3 solver non-convergence.

mod commands;
mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use arclaw_core::measures::MeasureError;

#[derive(Parser, Debug)]
#[command(name = "arclaw", version, about = "Random interval-map dynamics laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Emit the excursion coefficients cₙ, their partial sums and the
    /// square-root asymptote ratio as CSV.
    Walk(WalkArgs),
    /// Solve or validate a core-invariant measure and report β and b.
    Invariant(InvariantArgs),
    /// Run an occupation-time ensemble and emit one A_N value per trajectory.
    Simulate(SimulateArgs),
    /// Occupation ensemble plus Kolmogorov–Smirnov comparison against the
    /// generalized arcsine law.
    ArcsineTest(SimulateArgs),
    /// √N-normalized visit counts compared against the half-normal law.
    DkTest(DkArgs),
    /// Extend ν to the σ-finite tail measure μ and verify its invariance.
    MuCheck(MuArgs),
}

#[derive(Args, Debug, Clone)]
struct SystemArgs {
    /// Config file (TOML); flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Map family: hy | gen-hy | pl-gh | custom.
    #[arg(long)]
    family: Option<String>,
    /// Family parameter δ (decimal or fraction like 1/8).
    #[arg(long, value_parser = parse_num)]
    delta: Option<f64>,
    /// Core parameter c; defaults to the family recipe.
    #[arg(long, value_parser = parse_num)]
    c: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct MeasureArgs {
    /// Explicit atoms "pos:weight,pos:weight,..." (fractions allowed).
    #[arg(long)]
    atoms: Option<String>,
    /// Ulam grid size for solving a step density.
    #[arg(long)]
    grid: Option<usize>,
    /// Ulam stopping tolerance (L¹ residual).
    #[arg(long, value_parser = parse_num)]
    tol: Option<f64>,
    /// Ulam iteration cap.
    #[arg(long)]
    max_iters: Option<usize>,
}

#[derive(Args, Debug)]
struct WalkArgs {
    #[arg(long, default_value_t = 100_000)]
    max_n: usize,
    /// Output CSV path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct InvariantArgs {
    #[command(flatten)]
    system: SystemArgs,
    #[command(flatten)]
    measure: MeasureArgs,
    /// Write the measure in text form here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    system: SystemArgs,
    #[command(flatten)]
    measure: MeasureArgs,
    /// Steps per trajectory N.
    #[arg(long)]
    steps: Option<usize>,
    /// Number of trajectories M.
    #[arg(long)]
    traj: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Occupation indicator threshold (counts x ≥ threshold).
    #[arg(long, value_parser = parse_num)]
    threshold: Option<f64>,
    /// Low-bit dust amplitude for absolutely continuous measures
    /// (0 disables; default: on for Ulam densities, off for atoms).
    #[arg(long, value_parser = parse_num)]
    dust: Option<f64>,
    /// Start every trajectory at this point instead of drawing from ν.
    #[arg(long, value_parser = parse_num)]
    theta: Option<f64>,
    /// KS acceptance tolerance (arcsine-test only).
    #[arg(long, value_parser = parse_num)]
    ks_tol: Option<f64>,
    /// Output CSV path for the per-trajectory samples.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DkArgs {
    #[command(flatten)]
    sim: SimulateArgs,
    /// Target set lower bound (default: all of Y).
    #[arg(long, value_parser = parse_num)]
    e_lo: Option<f64>,
    /// Target set upper bound.
    #[arg(long, value_parser = parse_num)]
    e_hi: Option<f64>,
    /// Tail truncation depth for μ.
    #[arg(long)]
    depth: Option<usize>,
}

#[derive(Args, Debug)]
struct MuArgs {
    #[command(flatten)]
    system: SystemArgs,
    #[command(flatten)]
    measure: MeasureArgs,
    /// Tail truncation depth for μ.
    #[arg(long)]
    depth: Option<usize>,
    /// Residual tolerance for the invariance checks.
    #[arg(long = "residual-tol", value_parser = parse_num)]
    residual_tol: Option<f64>,
}

fn parse_num(s: &str) -> Result<f64, String> {
    arclaw_core::textio::parse_real(s).map_err(|e| e.to_string())
}

/// Parses the arguments and runs the selected command.
pub fn dispatch(args: Vec<String>) -> i32 {
    init_threads();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are successful exits; anything else is a config error
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Walk(a) => commands::walk(a),
        Command::Invariant(a) => commands::invariant(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::ArcsineTest(a) => commands::arcsine_test(a),
        Command::DkTest(a) => commands::dk_test(a),
        Command::MuCheck(a) => commands::mu_check(a),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            classify_error(&err)
        }
    }
}

fn classify_error(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(MeasureError::NonConvergence { .. }) = cause.downcast_ref::<MeasureError>() {
            return 3;
        }
    }
    2
}

fn init_threads() {
    if let Ok(v) = std::env::var("ARCLAW_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n > 0 {
                // ignore the error if a pool already exists (repeat dispatch)
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}
