//! Command-line experiment runner: Mandel runs, stabilization sweeps,
//! refinement tables, stage timings and analytical profiles, all as CSV.

pub mod config;
mod csv;
mod experiments;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::mandel::MandelError;
use crate::splitting::{SplitError, SplitMethod};

pub use config::{steps_for, ConfigFile, LSpec, Overrides, RunConfig};
pub use experiments::{analytic, bench, l_sweep, refinement_table, run, Outcome};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Mandel(#[from] MandelError),
    #[error(transparent)]
    Split(#[from] SplitError),
}

impl CliError {
    pub(crate) fn config(line: usize, message: impl Into<String>) -> Self {
        Self::Config { line, message: message.into() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "biot-split", version, about = "Fixed-stress splitting experiments on Mandel's problem")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// experiment file (key = value with [section] headers)
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// splitting method
    #[arg(long, global = true, value_name = "fs|pfs")]
    pub method: Option<SplitMethod>,
    /// stabilization parameter: a number, "phys" or "min"
    #[arg(long = "L", global = true, value_name = "VALUE|phys|min")]
    pub l: Option<LSpec>,
    /// threads of the mechanics stage
    #[arg(long, global = true, value_name = "N")]
    pub workers: Option<usize>,
    /// output directory
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// parameter preset (fig3, nu0.4, nu0.49, nu0.499, nu0.4999, nu0.49999)
    #[arg(long, global = true, value_name = "NAME")]
    pub preset: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Solve one configuration and write solution, iteration and summary files
    Run,
    /// Iteration counts over a grid of stabilization values, for both methods
    LSweep,
    /// Iteration counts under time-step and mesh refinement
    RefineTable,
    /// Stage wall times per worker count and preset
    Bench,
    /// Analytical pressure and displacement profiles
    Analytic,
}

impl CommonArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            preset: self.preset.clone(),
            method: self.method,
            l: self.l,
            workers: self.workers,
            out: self.out.clone(),
        }
    }

    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        RunConfig::from_file(&file, &self.overrides())
    }
}

/// Runs one subcommand; `Ok(true)` iff every requested solve converged.
pub fn execute(cli: &Cli) -> Result<bool, CliError> {
    let cfg = cli.common.resolve()?;
    std::fs::create_dir_all(&cfg.out_dir).map_err(|e| CliError::Io(format!("{}: {e}", cfg.out_dir.display())))?;
    let outcome = match cli.command {
        Command::Run => run(&cfg)?,
        Command::LSweep => l_sweep(&cfg)?,
        Command::RefineTable => refinement_table(&cfg)?,
        Command::Bench => bench(&cfg)?,
        Command::Analytic => analytic(&cfg)?,
    };
    for f in &outcome.files {
        log::info!("wrote {}", f.display());
    }
    Ok(outcome.converged)
}
