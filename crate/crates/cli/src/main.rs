// SPDX-License-Identifier: Apache-2.0

//! `idw`: generate point clouds, run interpolation, benchmark the grid,
//! score layouts and convert between them.
//!
//! Exit codes: 0 on success, 1 on I/O or file-format failures, 2 on usage
//! errors and illegal layout/precision combinations.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use idw_core::IdwError;

use commands::{AnalyzeArgs, BenchArgs, ConvertArgs, GenArgs, RunArgs};

#[derive(Debug, Parser)]
#[command(
    name = "idw",
    version,
    about = "Inverse-distance-weighted interpolation over memory layouts"
)]
struct Cli {
    /// JSON file whose keys mirror the subcommand's flags; flags win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic point cloud.
    Gen(GenArgs),
    /// Predict values at query locations.
    Run(RunArgs),
    /// Time every layout/strategy/precision cell.
    Bench(BenchArgs),
    /// Report memory-transaction utilization per layout.
    Analyze(AnalyzeArgs),
    /// Re-encode a point set in another layout.
    Convert(ConvertArgs),
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
}

impl From<IdwError> for CliError {
    fn from(e: IdwError) -> Self {
        if e.is_usage() {
            CliError::Usage(e.to_string())
        } else {
            CliError::Io(e.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = cli.config.as_deref();
    let result = match cli.command {
        Command::Gen(a) => config::merge(a, config).and_then(commands::gen),
        Command::Run(a) => config::merge(a, config).and_then(commands::run),
        Command::Bench(a) => config::merge(a, config).and_then(commands::bench),
        Command::Analyze(a) => config::merge(a, config).and_then(commands::analyze),
        Command::Convert(a) => config::merge(a, config).and_then(commands::convert),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
