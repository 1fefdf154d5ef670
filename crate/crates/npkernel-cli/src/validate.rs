//! The `validate` subcommand: production kernels against the brute-force
//! references on sampled graph pairs.

use clap::Args;
use npkernel::oracle::oracle_report;
use npkernel::{refine, ColorDictionary};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::common::{CliError, DatasetFlags, KernelFlags};

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub dataset: DatasetFlags,
    #[command(flatten)]
    pub kernel: KernelFlags,
    /// Sampled pairs for the edge convolution kernel.
    #[arg(long, default_value_t = 20)]
    pub npe_pairs: usize,
    /// Sampled pairs for the overlap kernel.
    #[arg(long, default_value_t = 20)]
    pub npo_pairs: usize,
    /// Sampled pairs for the path kernel; drawn from graphs with at most 12
    /// nodes because the reference enumerates every shortest path.
    #[arg(long, default_value_t = 10)]
    pub nps_pairs: usize,
    /// Pair sampling seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest accepted relative error for the real valued kernels.
    #[arg(long, default_value_t = 1e-12)]
    pub tolerance: f64,
}

fn sample_pairs(pool: &[usize], count: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut pairs: Vec<(usize, usize)> = pool
        .iter()
        .enumerate()
        .flat_map(|(k, &i)| pool[k..].iter().map(move |&j| (i, j)))
        .collect();
    pairs.shuffle(rng);
    pairs.truncate(count);
    pairs
}

pub fn run(args: &ValidateArgs) -> Result<(), CliError> {
    let dataset = args.dataset.load()?;
    let config = args.kernel.to_config(&dataset);
    let mut dict = ColorDictionary::new();
    let assignments = refine(&dataset, config.h, &mut dict);

    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let all: Vec<usize> = (0..dataset.len()).collect();
    let small: Vec<usize> = (0..dataset.len())
        .filter(|&i| dataset.graph(i).node_count() <= 12)
        .collect();
    let npe = sample_pairs(&all, args.npe_pairs, &mut rng);
    let npo = sample_pairs(&all, args.npo_pairs, &mut rng);
    let nps = sample_pairs(&small, args.nps_pairs, &mut rng);
    if nps.len() < args.nps_pairs {
        eprintln!(
            "note: only {} path kernel pairs available from graphs with at most 12 nodes",
            nps.len()
        );
    }

    let report = oracle_report(&dataset, &assignments, &config, &npe, &npo, &nps)?;
    print!("{}", report.render());
    if report.max_rel_error() > args.tolerance || !report.overlap_exact() {
        return Err(CliError::OracleMismatch {
            max_rel_error: report.max_rel_error(),
            overlap_exact: report.overlap_exact(),
        });
    }
    Ok(())
}
