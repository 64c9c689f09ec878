use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ssync_cli::{cmd_check, cmd_fuzz, cmd_render, cmd_run, FuzzArgs, RunOverrides};
use ssync_core::Backend;

#[derive(Parser)]
#[command(
    name = "ssync",
    version,
    about = "Simulate, check, fuzz and render robot gathering executions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a scenario and write its trace (exit 2 if the horizon is exhausted).
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        backend: Option<Backend>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long)]
        eps: Option<f64>,
        /// Accept a bivalent initial configuration (negative tests only).
        #[arg(long)]
        allow_forbidden: bool,
    },
    /// Re-check every property along a recorded trace (exit 3 on a violation).
    Check {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Seeded random executions; writes a replayable counterexample on failure.
    Fuzz {
        #[arg(long, default_value_t = 1000)]
        runs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "exact")]
        backend: Backend,
        #[arg(long, default_value_t = 3)]
        n_min: usize,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        /// Comma-separated: round_robin, all_active, random_k_fair, single_mover, stall, starve0.
        #[arg(long, value_delimiter = ',')]
        strategies: Vec<String>,
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long)]
        eps: Option<f64>,
        /// Directory for counterexample files.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Draw a trace as a multi-panel SVG.
    Render {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let code = match Cli::parse().command {
        Command::Run {
            scenario,
            out,
            backend,
            seed,
            horizon,
            eps,
            allow_forbidden,
        } => cmd_run(
            &scenario,
            &out,
            &RunOverrides {
                backend,
                seed,
                horizon,
                eps,
                allow_forbidden,
            },
        ),
        Command::Check { trace, eps } => cmd_check(&trace, eps),
        Command::Fuzz {
            runs,
            seed,
            backend,
            n_min,
            n_max,
            strategies,
            horizon,
            eps,
            out,
        } => cmd_fuzz(&FuzzArgs {
            runs,
            seed,
            backend,
            n_min,
            n_max,
            strategies,
            horizon,
            eps,
            out,
        }),
        Command::Render { trace, out } => cmd_render(&trace, &out),
    };
    ExitCode::from(code as u8)
}
