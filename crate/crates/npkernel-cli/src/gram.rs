//! The `gram` subcommand: one kernel matrix over a dataset, written to disk.

use std::path::PathBuf;

use clap::Args;
use npkernel::gram;
use npkernel::gram_io::{write_gram_binary, write_gram_csv, write_timing_json};

use crate::common::{CliError, DatasetFlags, EngineFlags, FormatArg, KernelFlags};

#[derive(Debug, Args)]
pub struct GramArgs {
    #[command(flatten)]
    pub dataset: DatasetFlags,
    #[command(flatten)]
    pub kernel: KernelFlags,
    #[command(flatten)]
    pub engine: EngineFlags,
    /// Scale the matrix to unit diagonal before writing.
    #[arg(long)]
    pub normalize: bool,
    /// Output format.
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
    /// Output file.
    #[arg(long, value_name = "FILE")]
    pub output: PathBuf,
    /// Also write per-phase wall clock timings to this JSON file.
    #[arg(long, value_name = "FILE")]
    pub timing_out: Option<PathBuf>,
}

pub fn run(args: &GramArgs) -> Result<(), CliError> {
    let dataset = args.dataset.load()?;
    let mut config = args.kernel.to_config(&dataset);
    config.normalize_gram = args.normalize;
    let options = args.engine.to_options()?;
    let matrix = gram(&dataset, &config, &options)?;
    match args.format {
        FormatArg::Csv => write_gram_csv(&args.output, &matrix)?,
        FormatArg::Bin => write_gram_binary(&args.output, &matrix)?,
    }
    if let Some(path) = &args.timing_out {
        write_timing_json(path, &matrix)?;
    }
    println!(
        "wrote {} {}x{} matrix to {} in {:.3} s",
        matrix.config.kind,
        matrix.n,
        matrix.n,
        args.output.display(),
        matrix.timing.total_s
    );
    Ok(())
}
