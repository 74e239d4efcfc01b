//! `qmine`: classical and simulated-quantum proof-of-work mining.
//!
//! Exit codes: 0 success, 1 failed check (sweep tolerance, invalid chain),
//! 2 usage or configuration error, 3 mining budget exhausted.

mod commands;
mod config;
mod format;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qmine::estimate::Assumptions;

use commands::{EstimateOptions, Failure};
use config::RunArgs;

#[derive(Debug, Parser)]
#[command(name = "qmine", version, about = "Grover-assisted proof-of-work on a state-vector simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mine one block classically, on the simulator, or both
    Mine {
        #[command(flatten)]
        run: RunArgs,
        /// Write the hash, oracle and diffusion circuits to this file
        #[arg(long, value_name = "PATH")]
        dump_circuit: Option<PathBuf>,
    },
    /// Success probability against Grover iteration count, as CSV
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 0)]
        k_min: u64,
        /// Defaults to twice the optimal iteration count plus one
        #[arg(long)]
        k_max: Option<u64>,
    },
    /// Classical vs quantum cost projection
    Estimate(EstimateArgs),
    /// Inspect a chain file
    #[command(subcommand)]
    Chain(ChainCommand),
}

#[derive(Debug, Args)]
struct EstimateArgs {
    /// Nonce width in bits
    #[arg(long, default_value_t = 48)]
    n: u32,
    /// Classical hashes per second
    #[arg(long, default_value_t = 7.0e6)]
    hash_rate: f64,
    /// Seconds per quantum gate
    #[arg(long, default_value_t = 1.0e-9)]
    gate_time: f64,
    #[arg(long, default_value_t = 1, conflicts_with = "measured")]
    gates_per_iteration: u64,
    /// Take gates per iteration from a built Grover iteration at hash width --m
    #[arg(long)]
    measured: bool,
    #[arg(long, default_value_t = 16, requires = "measured")]
    m: u32,
    #[arg(long, default_value_t = 2, requires = "measured")]
    rounds: u32,
}

#[derive(Debug, Subcommand)]
enum ChainCommand {
    /// Check digests, difficulty and links; exit 1 if any block fails
    Validate(ChainArgs),
    /// Print the chain as a table
    Show(ChainArgs),
}

#[derive(Debug, Args)]
struct ChainArgs {
    #[arg(long, value_name = "PATH")]
    chain_file: PathBuf,
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Mine { run, dump_circuit } => commands::mine(&run.resolve()?, dump_circuit.as_ref()),
        Command::Sweep { run, k_min, k_max } => commands::sweep(&run.resolve()?, k_min, k_max),
        Command::Estimate(a) => commands::estimate(&EstimateOptions {
            nonce_bits: a.n,
            assumptions: Assumptions {
                hash_rate: a.hash_rate,
                gate_time: a.gate_time,
                gates_per_iteration: a.gates_per_iteration,
            },
            measured: a.measured.then_some((a.m, a.rounds)),
        }),
        Command::Chain(ChainCommand::Validate(a)) => commands::chain_validate(&a.chain_file),
        Command::Chain(ChainCommand::Show(a)) => commands::chain_show(&a.chain_file),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Usage(msg) => eprintln!("error: {msg}"),
                Failure::Check(msg) => eprintln!("check failed: {msg}"),
                Failure::Exhausted => eprintln!("mining budget exhausted without a valid nonce"),
            }
            ExitCode::from(failure.exit_code())
        }
    }
}
