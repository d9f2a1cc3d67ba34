//! Command-line front end: load experiment configs, run model/circuit
//! simulations and sweeps, and export traces, spike trains, phase-plot
//! cycles, and sweep tables.
//!
//! Exit codes: 0 success, 1 config error, 2 numerical divergence, 3 I/O
//! error.

pub mod commands;
pub mod config;
pub mod error;
pub mod export;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "memvdp",
    about = "Simulation toolkit for two memristively coupled van der Pol relaxation oscillators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Parser)]
pub struct CommonArgs {
    /// Experiment config file (TOML). Defaults apply when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Bulk data format.
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,
    /// Echo the resolved configuration and progress.
    #[arg(long)]
    pub verbose: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate the dimensionless coupled oscillator model.
    SimulateModel(CommonArgs),
    /// Simulate the PUT oscillator circuit with the memristive coupling
    /// network.
    SimulateCircuit(CommonArgs),
    /// Run a detuning sweep and export the locking table.
    Sweep(CommonArgs),
    /// Drive the memristive device through a triangular I-V sweep.
    IvSweep(CommonArgs),
    /// Re-analyze an existing trace CSV (model or circuit).
    Analyze {
        /// Trace CSV produced by simulate-model or simulate-circuit.
        trace: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::SimulateModel(args) => commands::simulate_model(args),
        Command::SimulateCircuit(args) => commands::simulate_circuit(args),
        Command::Sweep(args) => commands::sweep(args),
        Command::IvSweep(args) => commands::iv_sweep(args),
        Command::Analyze { trace, common } => commands::analyze(trace, common),
    }
}
