//! Flag groups and error plumbing shared by the subcommands.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use npkernel::engine::{EngineError, EngineOptions};
use npkernel::gram_io::GramIoError;
use npkernel::kernels::KernelError;
use npkernel::synth::SynthError;
use npkernel::tu::TuError;
use npkernel::{
    parse_tu_dataset, BaseKernelSpec, Dataset, KernelConfig, KernelKind, Scheme,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Dataset(#[from] TuError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Output(#[from] GramIoError),
    #[error("graph index {index} is out of range for {count} graphs")]
    GraphIndex { index: usize, count: usize },
    #[error("NPKERNEL_WORKERS is {value:?}, expected a thread count")]
    WorkerEnv { value: String },
    #[error("{0} has no final path component to use as the dataset name")]
    NoName(PathBuf),
    #[error(
        "reference disagreement: max relative error {max_rel_error:.3e}, \
         overlap exact: {overlap_exact}"
    )]
    OracleMismatch {
        max_rel_error: f64,
        overlap_exact: bool,
    },
}

/// Last path component as a dataset name.
pub fn dir_name(path: &Path) -> Result<String, CliError> {
    path.file_name()
        .and_then(|name| name.to_str())
        .map(str::to_string)
        .ok_or_else(|| CliError::NoName(path.to_path_buf()))
}

/// Where to find a flat-text dataset.
#[derive(Debug, Args)]
pub struct DatasetFlags {
    /// Directory holding the <name>_A.txt, <name>_graph_indicator.txt and
    /// optional label, attribute and class files.
    #[arg(long, value_name = "DIR")]
    pub dataset: PathBuf,
    /// File name prefix inside the directory; defaults to the directory name.
    #[arg(long)]
    pub name: Option<String>,
}

impl DatasetFlags {
    pub fn load(&self) -> Result<Dataset, CliError> {
        let name = match &self.name {
            Some(name) => name.clone(),
            None => dir_name(&self.dataset)?,
        };
        Ok(parse_tu_dataset(&self.dataset, &name)?)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KernelArg {
    /// Edge convolution kernel over shared refined addresses.
    Npe,
    /// Edge overlap kernel (counting, integer valued).
    Npo,
    /// Weighted sum alpha * npe + (1 - alpha) * npo.
    Np,
    /// Shortest-path variant of the convolution kernel.
    Nps,
}

impl From<KernelArg> for KernelKind {
    fn from(arg: KernelArg) -> KernelKind {
        match arg {
            KernelArg::Npe => KernelKind::Npe,
            KernelArg::Npo => KernelKind::Npo,
            KernelArg::Np => KernelKind::Np,
            KernelArg::Nps => KernelKind::Nps,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SchemeArg {
    /// Shared feature buckets over the whole dataset.
    Global,
    /// Per-pair product graphs, pruned level by level.
    Pairwise,
}

impl From<SchemeArg> for Scheme {
    fn from(arg: SchemeArg) -> Scheme {
        match arg {
            SchemeArg::Global => Scheme::Global,
            SchemeArg::Pairwise => Scheme::Pairwise,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BaseArg {
    /// Constant 1, ignores attributes.
    Unit,
    /// Dot product of the attribute vectors.
    Linear,
    /// exp(-beta * squared distance) of the attribute vectors.
    Gaussian,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    /// Text matrix with one comment header line.
    Csv,
    /// Raw little endian f64 values plus a .meta.json sidecar.
    Bin,
}

/// Kernel configuration flags shared by `gram` and `validate`.
#[derive(Debug, Args)]
pub struct KernelFlags {
    /// Kernel to compute.
    #[arg(long, value_enum, default_value_t = KernelArg::Np)]
    pub kernel: KernelArg,
    /// Refinement depth; levels 1..=h enter the kernel sums.
    #[arg(long, default_value_t = 2)]
    pub h: usize,
    /// Weight of the convolution part in the combined kernel.
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    /// Base kernel on node attributes; falls back to unit when the dataset
    /// has no attributes.
    #[arg(long, value_enum, default_value_t = BaseArg::Gaussian)]
    pub base: BaseArg,
    /// Gaussian width; defaults to 1/d for attribute dimension d.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Also include the unrefined level 0 in the kernel sums.
    #[arg(long)]
    pub include_level0: bool,
    /// How the Gram matrix is filled.
    #[arg(long, value_enum, default_value_t = SchemeArg::Global)]
    pub scheme: SchemeArg,
    /// Scale each path bucket sum by 1 / (|bucket| * |bucket'|).
    #[arg(long)]
    pub nps_normalize: bool,
}

impl KernelFlags {
    /// Kernel configuration for `dataset`, with the gaussian width resolved
    /// from the attribute dimension when no explicit width was given.
    pub fn to_config(&self, dataset: &Dataset) -> KernelConfig {
        let mut config = KernelConfig::new(self.kernel.into());
        config.h = self.h;
        config.alpha = self.alpha;
        config.include_level0 = self.include_level0;
        config.scheme = self.scheme.into();
        config.nps_normalize = self.nps_normalize;
        config.base = match self.base {
            BaseArg::Unit => BaseKernelSpec::Unit,
            BaseArg::Linear => BaseKernelSpec::Linear,
            BaseArg::Gaussian => {
                let d = dataset.attribute_dim().unwrap_or(1);
                BaseKernelSpec::Gaussian {
                    beta: self.beta.unwrap_or(1.0 / d as f64),
                }
            }
        };
        config.resolve_base(dataset)
    }
}

/// Execution flags that do not change kernel values.
#[derive(Debug, Args)]
pub struct EngineFlags {
    /// Worker threads for the Gram fill; 0 or unset uses all cores. The
    /// NPKERNEL_WORKERS environment variable applies when the flag is absent.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Edge budget per product graph under the pairwise scheme.
    #[arg(long, default_value_t = EngineOptions::default().product_edge_budget)]
    pub product_edge_budget: u64,
}

impl EngineFlags {
    pub fn to_options(&self) -> Result<EngineOptions, CliError> {
        let workers = match self.workers {
            Some(count) => Some(count),
            None => match std::env::var("NPKERNEL_WORKERS") {
                Ok(value) => {
                    Some(value.parse().map_err(|_| CliError::WorkerEnv { value })?)
                }
                Err(_) => None,
            },
        };
        Ok(EngineOptions {
            workers,
            product_edge_budget: self.product_edge_budget,
        })
    }
}
