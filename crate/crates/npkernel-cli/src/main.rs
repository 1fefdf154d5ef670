//! Command line interface over the npkernel library: Gram matrices, scheme
//! benchmarks, brute-force validation, synthetic datasets and Graphviz
//! exports.

mod bench;
mod common;
mod gram;
mod inspect;
mod synth;
mod validate;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use crate::common::CliError;

/// Neighborhood preserving graph kernels on labeled, attributed graphs.
#[derive(Debug, Parser)]
#[command(name = "npkernel", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute a Gram matrix over a dataset and write it to disk.
    Gram(gram::GramArgs),
    /// Time the pairwise and global schemes over a synthetic grid.
    Bench(bench::BenchArgs),
    /// Check the production kernels against the brute-force references.
    Validate(validate::ValidateArgs),
    /// Generate a synthetic dataset in the flat-text format.
    Synth(synth::SynthArgs),
    /// Write Graphviz views of colorings, products and edge partitions.
    Inspect(inspect::InspectArgs),
}

/// Exit 0 on success, 1 on a command line problem, 2 on any error while
/// reading data, computing or writing results.
fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let informational =
                matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = err.print();
            return if informational {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    let result: Result<(), CliError> = match cli.command {
        Command::Gram(args) => gram::run(&args),
        Command::Bench(args) => bench::run(&args),
        Command::Validate(args) => validate::run(&args),
        Command::Synth(args) => synth::run(&args),
        Command::Inspect(args) => inspect::run(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            let mut source = std::error::Error::source(&err);
            while let Some(cause) = source {
                eprintln!("  caused by: {cause}");
                source = cause.source();
            }
            ExitCode::from(2)
        }
    }
}
