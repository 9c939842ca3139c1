//! `lasercom` — batch front-end for the optical-beacon link models.
//!
//! One subcommand per analysis; a single JSON scenario file describes
//! the terminals and each analysis' inputs. All outputs are SI CSV or
//! JSON tables with deterministic bytes: the same scenario and seed
//! produce identical files at any `--threads` setting.
//!
//! Exit codes: 0 success, 2 validation error, 3 numerical error.

mod commands;
mod output;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numerical(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(msg) => write!(f, "validation error: {msg}"),
            CliError::Numerical(msg) => write!(f, "numerical error: {msg}"),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "lasercom",
    version,
    about = "Link budgets, acquisition statistics, and constellation sizing for optical beacon terminals"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario file (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    scenario: Option<PathBuf>,

    /// Output directory for tables (created if missing).
    #[arg(long, global = true, default_value = ".", value_name = "DIR")]
    out: PathBuf,

    /// Override the scenario's Monte Carlo seed.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,

    /// Replace each terminal's beam width with the per-link acquisition
    /// optimum (`link` and `mc`; `acquire` always reports both columns).
    #[arg(long, global = true)]
    optimize_beamwidth: bool,

    /// Worker threads for parallel grids and Monte Carlo runs
    /// (default: all cores). Outputs do not depend on this.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Link-budget factors, received power and SNR (plus distance sweep).
    Link,
    /// Mutual-acquisition probability over distance x pointing error.
    Acquire,
    /// Monte Carlo mutual acquisition with beam-width modulation.
    Mc,
    /// Ring constellation: per-ring table, terminal counts, cost grid.
    Constellation,
    /// Attitude-knowledge error grid and MEMS thermal-noise surface.
    Attitude,
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Validation("--threads must be >= 1".to_string()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Validation(format!("thread pool: {e}")))?;
    }
    let path = cli.scenario.as_ref().ok_or_else(|| {
        CliError::Validation("--scenario <PATH> is required".to_string())
    })?;
    let scenario = scenario::ScenarioFile::load(path)?.into_scenario(cli.seed)?;

    std::fs::create_dir_all(&cli.out).map_err(|e| {
        CliError::Validation(format!("cannot create output dir {}: {e}", cli.out.display()))
    })?;

    match cli.command {
        Command::Link => commands::cmd_link(&scenario, &cli.out, cli.optimize_beamwidth),
        Command::Acquire => commands::cmd_acquire(&scenario, &cli.out),
        Command::Mc => commands::cmd_mc(&scenario, &cli.out, cli.optimize_beamwidth),
        Command::Constellation => commands::cmd_constellation(&scenario, &cli.out),
        Command::Attitude => commands::cmd_attitude(&scenario, &cli.out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("lasercom: {err}");
            match err {
                CliError::Validation(_) => ExitCode::from(2),
                CliError::Numerical(_) => ExitCode::from(3),
            }
        }
    }
}
