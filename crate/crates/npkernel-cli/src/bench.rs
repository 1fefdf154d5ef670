//! The `bench` subcommand: wall clock comparison of the two Gram schemes
//! over a grid of synthetic datasets.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use npkernel::wl::count_distinct_addresses;
use npkernel::{
    generate_synthetic, gram, refine, ColorDictionary, KernelConfig, KernelKind, Scheme,
};

use crate::common::{CliError, EngineFlags};

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Graphs per synthetic dataset.
    #[arg(long, default_value_t = 30)]
    pub graphs: usize,
    /// Nodes per graph.
    #[arg(long, default_value_t = 60)]
    pub nodes: usize,
    /// Edge densities to sweep.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.1, 0.2, 0.3, 0.4])]
    pub densities: Vec<f64>,
    /// Node label alphabet sizes to sweep.
    #[arg(long, value_delimiter = ',', default_values_t = vec![2, 3, 4])]
    pub labels: Vec<usize>,
    /// Refinement depth.
    #[arg(long, default_value_t = 2)]
    pub h: usize,
    /// Timing repetitions per cell and scheme; the fastest run counts.
    #[arg(long, default_value_t = 1)]
    pub repeats: usize,
    /// Dataset generation seed.
    #[arg(long)]
    pub seed: u64,
    /// Output CSV file.
    #[arg(long, value_name = "FILE")]
    pub output: PathBuf,
    #[command(flatten)]
    pub engine: EngineFlags,
}

/// One grid cell: parameters, alphabet sizes and per-scheme seconds.
#[derive(Debug, Clone, Copy)]
pub struct BenchRow {
    pub density: f64,
    pub sigma: usize,
    /// Distinct refinement colors over levels 0..=h.
    pub sigma_c: usize,
    /// Distinct edge addresses over levels 1..=h.
    pub lambda: usize,
    pub t_pairwise_s: f64,
    pub t_global_s: f64,
}

pub const BENCH_HEADER: &str = "density,sigma,sigma_c,lambda,t_pairwise_s,t_global_s";

/// Runs the grid, one row per (density, alphabet) cell in flag order.
///
/// The reported time per scheme is index plus fill, the work that actually
/// differs between the schemes; refinement is identical for both and
/// excluded.
pub fn run_grid(args: &BenchArgs) -> Result<Vec<BenchRow>, CliError> {
    let options = args.engine.to_options()?;
    let mut rows = Vec::new();
    let mut cell = 0u64;
    for &density in &args.densities {
        for &sigma in &args.labels {
            let dataset = generate_synthetic(
                args.graphs,
                args.nodes,
                density,
                sigma,
                0,
                args.seed.wrapping_add(cell),
            )?;
            cell += 1;

            let mut dict = ColorDictionary::new();
            let assignments = refine(&dataset, args.h, &mut dict);
            let sigma_c = dict.len();
            let lambda = count_distinct_addresses(&dataset, &assignments, 1..=args.h);

            let mut config = KernelConfig::new(KernelKind::Np);
            config.h = args.h;
            let mut time_scheme = |scheme: Scheme| -> Result<f64, CliError> {
                config.scheme = scheme;
                let mut best = f64::INFINITY;
                for _ in 0..args.repeats.max(1) {
                    let matrix = gram(&dataset, &config, &options)?;
                    best = best.min(matrix.timing.index_s + matrix.timing.fill_s);
                }
                Ok(best)
            };
            let t_pairwise_s = time_scheme(Scheme::Pairwise)?;
            let t_global_s = time_scheme(Scheme::Global)?;
            rows.push(BenchRow {
                density,
                sigma,
                sigma_c,
                lambda,
                t_pairwise_s,
                t_global_s,
            });
        }
    }
    Ok(rows)
}

pub fn render_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(BENCH_HEADER);
    out.push('\n');
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{:.6},{:.6}",
            row.density, row.sigma, row.sigma_c, row.lambda, row.t_pairwise_s, row.t_global_s
        )
        .expect("writing to a string cannot fail");
    }
    out
}

pub fn run(args: &BenchArgs) -> Result<(), CliError> {
    let rows = run_grid(args)?;
    let csv = render_csv(&rows);
    std::fs::write(&args.output, &csv)?;
    print!("{csv}");
    Ok(())
}
