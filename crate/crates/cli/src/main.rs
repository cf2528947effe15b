use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qram_cli::{cmd_example, cmd_montecarlo, cmd_run, ExperimentConfig, Failure};

/// Interference-aware radar resource management simulator.
///
/// Exit codes: 0 success, 1 example mismatch, 2 configuration error,
/// 3 runtime or I/O failure.
#[derive(Parser)]
#[command(name = "qram-sim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the three-task worked example and check its known outcome.
    Example,
    /// Generate one scenario and write allocations, schedules and scores.
    Run {
        /// Experiment config (JSON). Defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Scenario seed; defaults to the config's base_seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Monte-Carlo experiment over n_runs scenarios.
    Montecarlo {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; overrides the config.
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn load(path: Option<&Path>) -> Result<ExperimentConfig, Failure> {
    Ok(match path {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    })
}

fn dispatch(cli: Cli, out: &mut impl Write) -> Result<(), Failure> {
    match cli.command {
        Command::Example => cmd_example(out),
        Command::Run { config, seed, out: dir } => {
            let cfg = load(config.as_deref())?;
            let seed = seed.unwrap_or(cfg.base_seed);
            cmd_run(&cfg, seed, &dir, out)
        }
        Command::Montecarlo {
            config,
            out: dir,
            workers,
        } => {
            let cfg = load(config.as_deref())?;
            cmd_montecarlo(&cfg, &dir, workers, out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match dispatch(cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e:#}");
            ExitCode::from(e.exit_code())
        }
    }
}
