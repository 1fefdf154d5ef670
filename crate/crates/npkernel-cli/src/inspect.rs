//! The `inspect` subcommand: Graphviz views of one pair of graphs across the
//! refinement levels.

use std::fs;
use std::path::PathBuf;

use clap::Args;
use npkernel::dot::{coloring_dot, np_partition_dot, product_dot};
use npkernel::product::{build_product, np_edges, Side};
use npkernel::wl::dump_colorings;
use npkernel::{refine, ColorDictionary};

use crate::common::{CliError, DatasetFlags};

#[derive(Debug, Args)]
pub struct InspectArgs {
    #[command(flatten)]
    pub dataset: DatasetFlags,
    /// Refinement depth.
    #[arg(long, default_value_t = 2)]
    pub h: usize,
    /// The two graphs to compare.
    #[arg(long, num_args = 2, required = true, value_names = ["LEFT", "RIGHT"])]
    pub graphs: Vec<usize>,
    /// Output directory for the DOT files.
    #[arg(long, value_name = "DIR")]
    pub output: PathBuf,
    /// Also dump every color as plain text rows of graph, level, node, color.
    #[arg(long)]
    pub dump_colors: bool,
}

pub fn run(args: &InspectArgs) -> Result<(), CliError> {
    let dataset = args.dataset.load()?;
    let (left, right) = (args.graphs[0], args.graphs[1]);
    for &index in &args.graphs {
        if index >= dataset.len() {
            return Err(CliError::GraphIndex {
                index,
                count: dataset.len(),
            });
        }
    }
    let mut dict = ColorDictionary::new();
    let assignments = refine(&dataset, args.h, &mut dict);
    fs::create_dir_all(&args.output)?;
    let write = |file: String, text: String| -> Result<(), CliError> {
        let path = args.output.join(file);
        fs::write(&path, text)?;
        println!("wrote {}", path.display());
        Ok(())
    };

    for level in 0..=args.h {
        write(
            format!("g{left}_level{level}.dot"),
            coloring_dot(&dataset, left, &assignments[left], level),
        )?;
        if right != left {
            write(
                format!("g{right}_level{level}.dot"),
                coloring_dot(&dataset, right, &assignments[right], level),
            )?;
        }
        let product = build_product(
            dataset.graph(left),
            &assignments[left],
            dataset.graph(right),
            &assignments[right],
            level,
        );
        write(format!("product_level{level}.dot"), product_dot(&product))?;
        if level == args.h {
            write(
                format!("np_g{left}.dot"),
                np_partition_dot(&dataset, left, &np_edges(&product, Side::Left)),
            )?;
            write(
                format!("np_g{right}.dot"),
                np_partition_dot(&dataset, right, &np_edges(&product, Side::Right)),
            )?;
        }
    }
    if args.dump_colors {
        write("colors.txt".to_string(), dump_colorings(&assignments))?;
    }
    Ok(())
}
