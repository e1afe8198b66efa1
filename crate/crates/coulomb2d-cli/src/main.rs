//! Batch front end of the contact toolkit: every pipeline behind one
//! subcommand, driven by a JSON config, writing plot-ready CSV and JSON
//! reports. Identical config and version give byte-identical outputs.
//!
//! Exit codes: 0 success, 2 config error, 3 solver non-convergence,
//! 4 refused problem (lost coercivity or violated friction-anisotropy
//! condition), 1 internal failure.

mod commands;
mod config;
mod error;
mod output;

use clap::{Parser, Subcommand};
use error::CliError;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "coulomb2d",
    version,
    about = "Planar contact toolkit: half-space constants, sliding-indentor BEM, incremental FEM contact with Coulomb friction",
    after_help = "Environment: COULOMB2D_THREADS caps assembly parallelism."
)]
struct Cli {
    /// Path of the JSON run config.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory (created if missing). Default: current directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Sampling seed override for `probe` (config `seed` otherwise;
    /// default 0).
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Surface-response constants of a half-space, with an
    /// orientation-sweep CSV.
    Constants,
    /// Structure report of the discrete boundary operators on one mesh.
    Kernels,
    /// Steady sliding of a rigid indentor over a half-plane.
    SteadySlide,
    /// One incremental contact problem on a domain mesh.
    ContactStep,
    /// A quasistatic sequence of incremental steps.
    Evolve,
    /// Finite-sample structure diagnostics of the solution operator.
    Probe,
}

fn main() {
    init_thread_pool();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => {}
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(err.exit_code());
        }
    }
}

fn init_thread_pool() {
    if let Ok(text) = std::env::var("COULOMB2D_THREADS") {
        match text.parse::<usize>() {
            Ok(n) if n > 0 => {
                // Build the global pool before any parallel region; a
                // failure here means it was already initialized, which
                // only happens in tests.
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: COULOMB2D_THREADS must be a positive integer, got {text:?}");
                std::process::exit(2);
            }
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let config_path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config PATH is required".into()))?;
    let config_text = std::fs::read_to_string(config_path).map_err(|err| {
        CliError::Config(format!("cannot read {}: {err}", config_path.display()))
    })?;
    let out_dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));

    match cli.command {
        Command::Constants => commands::constants(&config_text, &out_dir),
        Command::Kernels => commands::kernels(&config_text, &out_dir),
        Command::SteadySlide => commands::steady_slide(&config_text, &out_dir),
        Command::ContactStep => commands::contact_step(&config_text, &out_dir),
        Command::Evolve => commands::evolve(&config_text, &out_dir),
        Command::Probe => commands::probe(&config_text, &out_dir, cli.seed),
    }
}
