//! Base kernels on node attributes and the edge-level kernel family built on
//! matching refined edge addresses.
//!
//! For one level the convolution kernel sums, over every address present in
//! both graphs, the base-kernel similarity of all edge pairs in the two
//! buckets, scaled by `1 / (|bucket| * |bucket'|)`. The counting kernel sums
//! `min(|bucket|, |bucket'|)` instead. The combined kernel is the convex
//! combination `alpha * convolution + (1 - alpha) * counting`, summed over
//! the configured levels.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Dataset, Graph};
use crate::wl::{feature_index, ColorAssignment, FeatureIndex};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("attribute dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("base kernel produced a non-finite value")]
    NonFinite,
    #[error("base kernel needs node attributes but the graphs have none")]
    AttributesMissing,
    #[error("refinement depth h must be at least 1")]
    ZeroDepth,
    #[error("alpha {0} must lie in [0, 1]")]
    BadAlpha(f64),
    #[error("gaussian width {0} must be finite and positive")]
    BadBeta(f64),
    #[error("histogram length mismatch: {left} vs {right}")]
    HistogramLength { left: usize, right: usize },
    #[error("edge address at level {level} is not part of the hierarchy")]
    UnknownAddress { level: u32 },
}

/// Kernel on two attribute vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BaseKernelSpec {
    /// Constant 1, also used whenever a dataset carries no attributes.
    Unit,
    /// Plain dot product.
    Linear,
    /// `exp(-beta * ||x - y||^2)`; the conventional default width is `1 / d`.
    Gaussian { beta: f64 },
}

impl BaseKernelSpec {
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64, KernelError> {
        if !matches!(self, BaseKernelSpec::Unit) && x.len() != y.len() {
            return Err(KernelError::DimensionMismatch {
                left: x.len(),
                right: y.len(),
            });
        }
        let value = match *self {
            BaseKernelSpec::Unit => 1.0,
            BaseKernelSpec::Linear => x.iter().zip(y).map(|(a, b)| a * b).sum(),
            BaseKernelSpec::Gaussian { beta } => {
                let sq: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                (-beta * sq).exp()
            }
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(KernelError::NonFinite)
        }
    }
}

impl std::fmt::Display for BaseKernelSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BaseKernelSpec::Unit => write!(f, "unit"),
            BaseKernelSpec::Linear => write!(f, "linear"),
            BaseKernelSpec::Gaussian { beta } => write!(f, "gaussian(beta={beta})"),
        }
    }
}

/// Kernel on two nodes' attributes under `base`.
pub fn eval_node_kernel(
    base: &BaseKernelSpec,
    x: &[f64],
    y: &[f64],
) -> Result<f64, KernelError> {
    base.eval(x, y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Npe,
    Npo,
    Np,
    Nps,
}

impl std::fmt::Display for KernelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            KernelKind::Npe => "npe",
            KernelKind::Npo => "npo",
            KernelKind::Np => "np",
            KernelKind::Nps => "nps",
        };
        write!(f, "{name}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Shared feature buckets over the whole dataset.
    Global,
    /// Per-pair product graph, pruned level by level.
    Pairwise,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scheme::Global => write!(f, "global"),
            Scheme::Pairwise => write!(f, "pairwise"),
        }
    }
}

/// Full description of one kernel computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    pub kind: KernelKind,
    /// Refinement depth; levels `1..=h` enter the kernel sums.
    pub h: usize,
    /// Weight of the convolution part in the combined kernel.
    pub alpha: f64,
    pub base: BaseKernelSpec,
    /// Also include the unrefined level 0 in the kernel sums.
    pub include_level0: bool,
    pub scheme: Scheme,
    /// Scale each path bucket by `1 / (|bucket| * |bucket'|)`.
    pub nps_normalize: bool,
    /// Normalize the finished Gram matrix to unit diagonal.
    pub normalize_gram: bool,
}

impl KernelConfig {
    pub fn new(kind: KernelKind) -> Self {
        KernelConfig {
            kind,
            h: 2,
            alpha: 0.5,
            base: BaseKernelSpec::Unit,
            include_level0: false,
            scheme: Scheme::Global,
            nps_normalize: false,
            normalize_gram: false,
        }
    }

    pub fn validate(&self) -> Result<(), KernelError> {
        if self.h == 0 {
            return Err(KernelError::ZeroDepth);
        }
        if !(0.0..=1.0).contains(&self.alpha) || !self.alpha.is_finite() {
            return Err(KernelError::BadAlpha(self.alpha));
        }
        if let BaseKernelSpec::Gaussian { beta } = self.base {
            if !(beta.is_finite() && beta > 0.0) {
                return Err(KernelError::BadBeta(beta));
            }
        }
        Ok(())
    }

    /// Levels entering the kernel sums, ascending.
    pub fn levels(&self) -> Vec<usize> {
        let start = if self.include_level0 { 0 } else { 1 };
        (start..=self.h).collect()
    }

    /// Replaces an attribute-based base kernel by the unit kernel when the
    /// dataset carries no attributes.
    pub fn resolve_base(mut self, dataset: &Dataset) -> Self {
        if dataset.attribute_dim().is_none() {
            self.base = BaseKernelSpec::Unit;
        }
        self
    }
}

fn node_kernel(
    base: &BaseKernelSpec,
    gl: &Graph,
    u: usize,
    gr: &Graph,
    v: usize,
) -> Result<f64, KernelError> {
    match (gl.attributes(u), gr.attributes(v)) {
        (Some(x), Some(y)) => base.eval(x, y),
        _ => match base {
            BaseKernelSpec::Unit => Ok(1.0),
            _ => Err(KernelError::AttributesMissing),
        },
    }
}

/// Base-kernel similarity of two oriented edges.
///
/// For a palindromic address the colors give no orientation, so the two
/// admissible endpoint pairings are averaged; that keeps the value invariant
/// under node renumbering while preserving positive semidefiniteness.
pub fn edge_pair_value(
    base: &BaseKernelSpec,
    gl: &Graph,
    e: (usize, usize),
    gr: &Graph,
    f: (usize, usize),
    palindromic: bool,
) -> Result<f64, KernelError> {
    let aligned = node_kernel(base, gl, e.0, gr, f.0)? * node_kernel(base, gl, e.1, gr, f.1)?;
    if !palindromic {
        return Ok(aligned);
    }
    let crossed = node_kernel(base, gl, e.0, gr, f.1)? * node_kernel(base, gl, e.1, gr, f.0)?;
    Ok(0.5 * (aligned + crossed))
}

/// Sum of [`edge_pair_value`] over the cartesian product of two buckets,
/// iterated in sorted order on both sides.
pub fn bucket_pair_sum(
    base: &BaseKernelSpec,
    gl: &Graph,
    bucket_l: &[(usize, usize)],
    gr: &Graph,
    bucket_r: &[(usize, usize)],
    palindromic: bool,
) -> Result<f64, KernelError> {
    let mut sum = 0.0;
    for &e in bucket_l {
        for &f in bucket_r {
            sum += edge_pair_value(base, gl, e, gr, f, palindromic)?;
        }
    }
    Ok(sum)
}

/// Convolution kernel restricted to one level, evaluated on prebuilt feature
/// indexes. Addresses are visited in ascending order.
pub fn npe_level(
    base: &BaseKernelSpec,
    gl: &Graph,
    il: &FeatureIndex,
    gr: &Graph,
    ir: &FeatureIndex,
) -> Result<f64, KernelError> {
    let mut total = 0.0;
    for (address, bucket_l) in il {
        if let Some(bucket_r) = ir.get(address) {
            let sum = bucket_pair_sum(base, gl, bucket_l, gr, bucket_r, address.is_palindromic())?;
            total += sum / (bucket_l.len() * bucket_r.len()) as f64;
        }
    }
    Ok(total)
}

/// Counting kernel restricted to one level: sum of `min(|bucket|, |bucket'|)`
/// over shared addresses.
pub fn npo_level(il: &FeatureIndex, ir: &FeatureIndex) -> u64 {
    il.iter()
        .filter_map(|(address, bucket_l)| {
            ir.get(address)
                .map(|bucket_r| bucket_l.len().min(bucket_r.len()) as u64)
        })
        .sum()
}

/// Convolution kernel between two refined graphs, summed over the levels of
/// `config`.
pub fn npe_pair(
    gl: &Graph,
    al: &ColorAssignment,
    gr: &Graph,
    ar: &ColorAssignment,
    config: &KernelConfig,
) -> Result<f64, KernelError> {
    config.validate()?;
    let mut total = 0.0;
    for level in config.levels() {
        let il = feature_index(gl, al, level);
        let ir = feature_index(gr, ar, level);
        total += npe_level(&config.base, gl, &il, gr, &ir)?;
    }
    Ok(total)
}

/// Counting kernel between two refined graphs, summed over levels `1..=h`.
pub fn npo_pair(
    gl: &Graph,
    al: &ColorAssignment,
    gr: &Graph,
    ar: &ColorAssignment,
    h: usize,
) -> u64 {
    (1..=h)
        .map(|level| {
            let il = feature_index(gl, al, level);
            let ir = feature_index(gr, ar, level);
            npo_level(&il, &ir)
        })
        .sum()
}

fn npo_over_levels(
    gl: &Graph,
    al: &ColorAssignment,
    gr: &Graph,
    ar: &ColorAssignment,
    levels: &[usize],
) -> u64 {
    levels
        .iter()
        .map(|&level| {
            let il = feature_index(gl, al, level);
            let ir = feature_index(gr, ar, level);
            npo_level(&il, &ir)
        })
        .sum()
}

/// Combined kernel `alpha * convolution + (1 - alpha) * counting` over the
/// levels of `config`.
pub fn np_pair(
    gl: &Graph,
    al: &ColorAssignment,
    gr: &Graph,
    ar: &ColorAssignment,
    config: &KernelConfig,
) -> Result<f64, KernelError> {
    config.validate()?;
    let npe = if config.alpha > 0.0 {
        npe_pair(gl, al, gr, ar, config)?
    } else {
        0.0
    };
    let npo = if config.alpha < 1.0 {
        npo_over_levels(gl, al, gr, ar, &config.levels()) as f64
    } else {
        0.0
    };
    Ok(config.alpha * npe + (1.0 - config.alpha) * npo)
}
