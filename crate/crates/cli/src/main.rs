//! `corrdet`: reproduce trade-off curves, compute designs, run simulations.

mod args;
mod design;
mod output;
mod reproduce;
mod simulate;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

#[derive(Parser)]
#[command(
    name = "corrdet",
    version,
    about = "Chernoff-exponent design of correlation and energy detectors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the E_MD vs E_0 curves of one of the four worked examples (CSV + gnuplot script).
    Reproduce(reproduce::ReproduceArgs),
    /// Optimize a detector and print it as JSON lines.
    Design(design::DesignArgs),
    /// Monte Carlo check of a stored design against its Chernoff bounds (CSV).
    Simulate(simulate::SimulateArgs),
    /// Re-evaluate stored designs and compare with their recorded exponents.
    Evaluate(design::EvaluateArgs),
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numeric(String),
    #[error(transparent)]
    Core(#[from] corrdet::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Core(corrdet::Error::InvalidParameter(_)) => 2,
            CliError::Json(_) => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Reproduce(a) => reproduce::run(&a),
        Command::Design(a) => design::run(&a),
        Command::Simulate(a) => simulate::run(&a),
        Command::Evaluate(a) => design::evaluate(&a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("corrdet: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
