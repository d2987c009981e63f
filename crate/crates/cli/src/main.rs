//! `dressed`: command-line front end for the dressed-electron numerics.

mod commands;
mod config;
mod report;

use std::process::ExitCode;

use clap::Parser;

use crate::commands::Command;
use crate::config::{ConfigError, GlobalArgs, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "dressed",
    version,
    about = "Dressed-electron mean fields, photon clouds and infrared-finite spectra",
    long_about = "Dressed-electron mean fields, photon clouds and infrared-finite spectra.\n\n\
        All inputs and outputs are in units where the electron mass is one (hbar = c = 1): \
        energies and momenta in m, lengths and times in 1/m. --mass rescales the electron; \
        --alpha sets the coupling e². Profiles default to CSV (audit metadata goes to a \
        .meta.json sidecar, or stderr when writing to stdout); summaries default to JSON."
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numeric(#[from] dressed_core::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 2,
            CliError::Numeric(_) | CliError::Io(_) => 1,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = RunConfig::resolve(&cli.global)?;
    let report = commands::execute(&cli.command, &config)?;
    report.write(&config)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dressed: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
