//! The `synth` subcommand: deterministic random datasets on disk.

use std::path::PathBuf;

use clap::Args;
use npkernel::{generate_synthetic, generate_two_class, write_tu_dataset};

use crate::common::{dir_name, CliError};

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Number of graphs.
    #[arg(long, default_value_t = 30)]
    pub graphs: usize,
    /// Nodes per graph.
    #[arg(long, default_value_t = 20)]
    pub nodes: usize,
    /// Fraction of all node pairs that become edges.
    #[arg(long, default_value_t = 0.3)]
    pub density: f64,
    /// Node label alphabet size.
    #[arg(long, default_value_t = 3)]
    pub labels: usize,
    /// Attribute dimension; 0 generates no attributes.
    #[arg(long, default_value_t = 0)]
    pub attributes: usize,
    /// Attach binary class labels and add this to every attribute coordinate
    /// of the second half of the graphs.
    #[arg(long, value_name = "SHIFT")]
    pub class_shift: Option<f64>,
    /// Generation seed.
    #[arg(long)]
    pub seed: u64,
    /// Output directory for the flat-text files.
    #[arg(long, value_name = "DIR")]
    pub output: PathBuf,
    /// Dataset name; defaults to the output directory name.
    #[arg(long)]
    pub name: Option<String>,
}

pub fn run(args: &SynthArgs) -> Result<(), CliError> {
    let dataset = match args.class_shift {
        Some(shift) => generate_two_class(
            args.graphs,
            args.nodes,
            args.density,
            args.labels,
            args.attributes,
            shift,
            args.seed,
        )?,
        None => generate_synthetic(
            args.graphs,
            args.nodes,
            args.density,
            args.labels,
            args.attributes,
            args.seed,
        )?,
    };
    let name = match &args.name {
        Some(name) => name.clone(),
        None => dir_name(&args.output)?,
    };
    let dataset = dataset.with_name(&name);
    write_tu_dataset(&dataset, &args.output)?;
    println!(
        "wrote {} graphs to {}",
        dataset.len(),
        args.output.join(format!("{name}_*.txt")).display()
    );
    Ok(())
}
