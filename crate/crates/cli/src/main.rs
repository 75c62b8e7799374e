//! Command-line front end: parses a TOML run configuration plus `--set`
//! overrides, dispatches to the engine, and writes CSV artifacts with a
//! `manifest.json` run record next to them.
//!
//! Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
//! abort. Usage errors from the argument parser also exit 2.

mod commands;
mod figures;
mod manifest;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use scc_core::error::ErrorCategory;
use scc_core::{load_config, EngineError, RunConfig};

use crate::manifest::Manifest;

#[derive(Parser)]
#[command(
    name = "scc",
    version,
    about = "Deterministic climate-economy engine: social costs of carbon, \
             national liabilities, and historical climate debt"
)]
struct Cli {
    /// TOML run-configuration file; defaults apply when omitted.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Directory for output artifacts.
    #[arg(long, global = true, default_value = "out", value_name = "DIR")]
    out: PathBuf,

    /// Override one config key (dotted paths allowed), e.g. `--set prtp=0.01`
    /// or `--set climate.climate_sensitivity_c=4.5`. Repeatable; overrides
    /// win over file values.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Simulate the baseline world and write its trajectory and damages.
    Run,
    /// National and global social cost of carbon at the configured pulse year.
    Scc,
    /// Social cost of carbon struck at a ladder of pulse years.
    SccPath,
    /// Blame matrix and net liabilities struck at the pulse year.
    Liability,
    /// Historical climate debt from the bundled emissions record.
    Debt,
    /// Fit the damage-function family to warming-impact observations.
    Fit,
    /// Parameter grid: one-at-a-time by default, cartesian on request.
    Sensitivity,
    /// One tidy CSV per figure of the analysis.
    EmitFigures,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Run => "run",
            Command::Scc => "scc",
            Command::SccPath => "scc-path",
            Command::Liability => "liability",
            Command::Debt => "debt",
            Command::Fit => "fit",
            Command::Sensitivity => "sensitivity",
            Command::EmitFigures => "emit-figures",
        }
    }
}

fn parse_overrides(raw: &[String]) -> Result<Vec<(String, String)>, EngineError> {
    raw.iter()
        .map(|entry| {
            entry
                .split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.to_string()))
                .ok_or_else(|| {
                    EngineError::Config(format!("override {entry:?} is not KEY=VALUE"))
                })
        })
        .collect()
}

/// Honor the worker-count environment variable before any parallel work runs.
fn configure_workers() -> Result<(), EngineError> {
    let Some(raw) = std::env::var_os("SCC_WORKERS") else {
        return Ok(());
    };
    let raw = raw.to_string_lossy();
    let workers: usize = raw
        .parse()
        .ok()
        .filter(|n| *n >= 1)
        .ok_or_else(|| {
            EngineError::Config(format!("SCC_WORKERS must be a positive integer, got {raw:?}"))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .map_err(|e| EngineError::Config(format!("cannot size worker pool: {e}")))
}

fn dispatch(cli: &Cli) -> Result<(), EngineError> {
    configure_workers()?;
    let overrides = parse_overrides(&cli.set)?;
    let config: RunConfig = load_config(cli.config.as_deref(), &overrides)?;
    let hash = config.effective_hash()?;

    let mut manifest = Manifest::new(cli.command.name(), &hash);
    let started = Instant::now();
    match cli.command {
        Command::Run => commands::run(&config, &cli.out, &mut manifest)?,
        Command::Scc => commands::scc(&config, &cli.out, &hash, &mut manifest)?,
        Command::SccPath => commands::scc_path(&config, &cli.out, &hash, &mut manifest)?,
        Command::Liability => commands::liability(&config, &cli.out, &mut manifest)?,
        Command::Debt => commands::debt(&config, &cli.out, &mut manifest)?,
        Command::Fit => commands::fit(&config, &cli.out, &mut manifest)?,
        Command::Sensitivity => commands::sensitivity(&config, &cli.out, &mut manifest)?,
        Command::EmitFigures => figures::emit(&config, &cli.out, &mut manifest)?,
    }
    manifest.finish(started.elapsed(), &cli.out)
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = dispatch(&cli) {
        let category = err.category().as_str();
        let message = err.to_string();
        let message = message
            .strip_prefix(&format!("{category}: "))
            .unwrap_or(&message);
        eprintln!("error[{category}]: {message}");
        std::process::exit(match err.category() {
            ErrorCategory::Config => 2,
            ErrorCategory::Data => 3,
            ErrorCategory::Numerical => 4,
        });
    }
}
