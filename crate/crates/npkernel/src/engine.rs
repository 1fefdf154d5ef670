//! Gram matrix construction, spectral checks, normalization and nearest
//! neighbor evaluation.
//!
//! Both evaluation schemes accumulate per-address sums over the same pair
//! sequence in the same order, so they produce bitwise identical matrices;
//! they differ only in how the shared addresses are found. The global scheme
//! scans the dataset-wide address list once per pair, the pairwise scheme
//! materializes the product graph of each pair and prunes it level by level.
//!
//! The pair fill runs on a dedicated thread pool with an order-preserving
//! map, so results do not depend on the worker count.

use std::collections::BTreeMap;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::Dataset;
use crate::kernels::{
    bucket_pair_sum, edge_pair_value, KernelConfig, KernelError, KernelKind, Scheme,
};
use crate::paths::{extract_paths, nps_level, path_index, CanonicalPath, PathIndex};
use crate::product::{build_product, convolution_pairs, pairs_by_address, prune_product};
use crate::wl::{
    address_union, dataset_index, refine, ColorAssignment, ColorDictionary, EdgeAddress,
    FeatureIndex,
};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("matrix is not symmetric at ({i}, {j})")]
    NonSymmetric { i: usize, j: usize },
    #[error("cannot normalize: diagonal entry {index} is {value}")]
    NonPositiveDiagonal { index: usize, value: f64 },
    #[error(
        "product graph for pair ({left}, {right}) needs about {edges} edges, \
         over the budget of {budget}; raise the budget or switch to the global scheme"
    )]
    ProductTooLarge {
        left: usize,
        right: usize,
        edges: u64,
        budget: u64,
    },
    #[error("dataset carries no class labels")]
    ClassLabelsMissing,
    #[error("expected {expected} class labels, got {got}")]
    LabelCount { expected: usize, got: usize },
    #[error("need between 2 and {n} folds, got {folds}")]
    BadFolds { folds: usize, n: usize },
    #[error("neighbor count k must be at least 1")]
    BadNeighborCount,
}

/// Execution knobs that do not affect kernel values.
#[derive(Debug, Clone, Copy)]
pub struct EngineOptions {
    /// Worker threads for the pair fill; `None` uses all cores.
    pub workers: Option<usize>,
    /// Upper bound on estimated product graph edges per pair under the
    /// pairwise scheme.
    pub product_edge_budget: u64,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            workers: None,
            product_edge_budget: 20_000_000,
        }
    }
}

/// Wall-clock seconds per phase of one Gram computation.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct GramTiming {
    pub refine_s: f64,
    pub index_s: f64,
    pub fill_s: f64,
    pub total_s: f64,
}

/// Dense symmetric kernel matrix over a dataset, row major.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    pub n: usize,
    pub values: Vec<f64>,
    pub config: KernelConfig,
    pub timing: GramTiming,
    pub normalized: bool,
}

impl GramMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }
}

/// Per-level data the global scheme shares across all pairs: one feature
/// index per graph plus the sorted union of every address in the dataset.
struct LevelData {
    indexes: Vec<FeatureIndex>,
    lambda: Vec<EdgeAddress>,
}

/// Everything the global scheme shares across pairs.
struct GlobalPlan<'a> {
    dataset: &'a Dataset,
    config: &'a KernelConfig,
    level_data: &'a BTreeMap<usize, LevelData>,
    npe_levels: &'a [usize],
    npo_levels: &'a [usize],
}

impl GlobalPlan<'_> {
    /// One scan of a level's address list for one pair, accumulating the
    /// edge convolution and the overlap count together so shared buckets are
    /// only looked up once.
    fn level_sums(
        &self,
        level: usize,
        data: &LevelData,
        i: usize,
        j: usize,
    ) -> Result<(f64, u64), KernelError> {
        let wants_npe = self.npe_levels.contains(&level);
        let wants_npo = self.npo_levels.contains(&level);
        let (gl, gr) = (self.dataset.graph(i), self.dataset.graph(j));
        let (il, ir) = (&data.indexes[i], &data.indexes[j]);
        let mut npe = 0.0;
        let mut npo = 0u64;
        for address in &data.lambda {
            let Some(bucket_l) = il.get(address) else {
                continue;
            };
            let Some(bucket_r) = ir.get(address) else {
                continue;
            };
            if wants_npe {
                let sum = bucket_pair_sum(
                    &self.config.base,
                    gl,
                    bucket_l,
                    gr,
                    bucket_r,
                    address.is_palindromic(),
                )?;
                npe += sum / (bucket_l.len() * bucket_r.len()) as f64;
            }
            if wants_npo {
                npo += bucket_l.len().min(bucket_r.len()) as u64;
            }
        }
        Ok((npe, npo))
    }

    fn value(&self, i: usize, j: usize) -> Result<f64, KernelError> {
        let mut npe_total = 0.0;
        let mut npo_total = 0u64;
        for (&level, data) in self.level_data {
            let (npe, npo) = self.level_sums(level, data, i, j)?;
            npe_total += npe;
            npo_total += npo;
        }
        Ok(combine(self.config, npe_total, npo_total))
    }
}

fn combine(config: &KernelConfig, npe_total: f64, npo_total: u64) -> f64 {
    match config.kind {
        KernelKind::Npe | KernelKind::Nps => npe_total,
        KernelKind::Npo => npo_total as f64,
        KernelKind::Np => config.alpha * npe_total + (1.0 - config.alpha) * npo_total as f64,
    }
}

/// Estimated product edge count for one pair from start-level indexes;
/// palindromic buckets connect each edge pair twice.
fn product_edge_estimate(il: &FeatureIndex, ir: &FeatureIndex) -> u64 {
    let mut edges = 0u64;
    for (address, bucket_l) in il {
        if let Some(bucket_r) = ir.get(address) {
            let combos = bucket_l.len() as u64 * bucket_r.len() as u64;
            edges += if address.is_palindromic() {
                2 * combos
            } else {
                combos
            };
        }
    }
    edges
}

/// Everything the pairwise scheme shares across pairs.
struct PairwisePlan<'a> {
    dataset: &'a Dataset,
    assignments: &'a [ColorAssignment],
    config: &'a KernelConfig,
    options: &'a EngineOptions,
    start_indexes: &'a [FeatureIndex],
    npe_levels: &'a [usize],
    npo_levels: &'a [usize],
}

impl PairwisePlan<'_> {
    fn value(&self, i: usize, j: usize) -> Result<f64, EngineError> {
        let estimate = product_edge_estimate(&self.start_indexes[i], &self.start_indexes[j]);
        if estimate > self.options.product_edge_budget {
            return Err(EngineError::ProductTooLarge {
                left: i,
                right: j,
                edges: estimate,
                budget: self.options.product_edge_budget,
            });
        }
        let (gl, gr) = (self.dataset.graph(i), self.dataset.graph(j));
        let (al, ar) = (&self.assignments[i], &self.assignments[j]);
        let levels = || self.npe_levels.iter().chain(self.npo_levels);
        let first = *levels().min().expect("levels");
        let last = *levels().max().expect("levels");
        let mut product = build_product(gl, al, gr, ar, first);
        let mut npe_total = 0.0;
        let mut npo_total = 0u64;
        for level in first..=last {
            let wants_npe = self.npe_levels.contains(&level);
            let wants_npo = self.npo_levels.contains(&level);
            if wants_npe || wants_npo {
                let pairs = convolution_pairs(&product);
                let grouped = pairs_by_address(&pairs);
                // Accumulate one level at a time, exactly like the global
                // scheme, so both schemes add the same floats in the same
                // association and stay bitwise equal.
                let mut level_npe = 0.0;
                for (address, (list, nl, nr)) in &grouped {
                    if wants_npe {
                        let mut sum = 0.0;
                        for &(e, f) in list {
                            sum += edge_pair_value(
                                &self.config.base,
                                gl,
                                e,
                                gr,
                                f,
                                address.is_palindromic(),
                            )?;
                        }
                        level_npe += sum / (nl * nr) as f64;
                    }
                    if wants_npo {
                        npo_total += (*nl).min(*nr) as u64;
                    }
                }
                if wants_npe {
                    npe_total += level_npe;
                }
            }
            if level < last {
                product = prune_product(&product, al, ar);
            }
        }
        Ok(combine(self.config, npe_total, npo_total))
    }
}

/// Computes the full Gram matrix of `dataset` under `config`.
///
/// The upper triangle is filled in parallel in row major pair order and
/// mirrored; normalization is applied afterwards when the config asks for
/// it.
pub fn gram(
    dataset: &Dataset,
    config: &KernelConfig,
    options: &EngineOptions,
) -> Result<GramMatrix, EngineError> {
    config.validate()?;
    let config = config.resolve_base(dataset);
    let started = Instant::now();
    let n = dataset.graphs().len();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.workers.unwrap_or(0))
        .build()
        .expect("thread pool construction failed");

    let refine_started = Instant::now();
    let mut dict = ColorDictionary::new();
    let assignments = pool.install(|| refine(dataset, config.h, &mut dict));
    let refine_s = refine_started.elapsed().as_secs_f64();

    let wants_npe = match config.kind {
        KernelKind::Npe => true,
        KernelKind::Np => config.alpha > 0.0,
        KernelKind::Npo | KernelKind::Nps => false,
    };
    let wants_npo = match config.kind {
        KernelKind::Npo => true,
        KernelKind::Np => config.alpha < 1.0,
        KernelKind::Npe | KernelKind::Nps => false,
    };
    let npe_levels: Vec<usize> = if wants_npe { config.levels() } else { Vec::new() };
    let npo_levels: Vec<usize> = if wants_npo { (1..=config.h).collect() } else { Vec::new() };

    let index_started = Instant::now();
    let mut level_data: BTreeMap<usize, LevelData> = BTreeMap::new();
    let mut start_indexes: Vec<FeatureIndex> = Vec::new();
    let mut path_indexes: Vec<Vec<PathIndex>> = Vec::new();
    let nps_levels = config.levels();
    match (config.kind, config.scheme) {
        (KernelKind::Nps, _) => {
            let paths: Vec<Vec<CanonicalPath>> = pool.install(|| {
                dataset
                    .graphs()
                    .par_iter()
                    .zip(assignments.par_iter())
                    .map(|(g, a)| extract_paths(g, a, config.h, None))
                    .collect()
            });
            path_indexes = pool.install(|| {
                dataset
                    .graphs()
                    .par_iter()
                    .enumerate()
                    .map(|(gi, g)| {
                        nps_levels
                            .iter()
                            .map(|&level| path_index(g, &paths[gi], &assignments[gi], level))
                            .collect()
                    })
                    .collect()
            });
        }
        (_, Scheme::Global) => {
            for &level in npe_levels.iter().chain(&npo_levels) {
                level_data.entry(level).or_insert_with(|| {
                    let indexes =
                        pool.install(|| dataset_index(dataset, &assignments, level));
                    let lambda = address_union(&indexes).into_iter().collect();
                    LevelData { indexes, lambda }
                });
            }
        }
        (_, Scheme::Pairwise) => {
            let first = *npe_levels
                .iter()
                .chain(&npo_levels)
                .min()
                .expect("at least one level is always in range");
            start_indexes = pool.install(|| dataset_index(dataset, &assignments, first));
        }
    }
    let index_s = index_started.elapsed().as_secs_f64();

    let fill_started = Instant::now();
    let global = GlobalPlan {
        dataset,
        config: &config,
        level_data: &level_data,
        npe_levels: &npe_levels,
        npo_levels: &npo_levels,
    };
    let plan = PairwisePlan {
        dataset,
        assignments: &assignments,
        config: &config,
        options,
        start_indexes: &start_indexes,
        npe_levels: &npe_levels,
        npo_levels: &npo_levels,
    };
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i..n).map(move |j| (i, j)))
        .collect();
    let upper: Vec<f64> = pool.install(|| {
        pairs
            .par_iter()
            .map(|&(i, j)| -> Result<f64, EngineError> {
                match (config.kind, config.scheme) {
                    (KernelKind::Nps, _) => {
                        let (gl, gr) = (dataset.graph(i), dataset.graph(j));
                        let mut total = 0.0;
                        for (il, ir) in path_indexes[i].iter().zip(&path_indexes[j]) {
                            total +=
                                nps_level(&config.base, gl, il, gr, ir, config.nps_normalize)?;
                        }
                        Ok(total)
                    }
                    (_, Scheme::Global) => Ok(global.value(i, j)?),
                    (_, Scheme::Pairwise) => plan.value(i, j),
                }
            })
            .collect::<Result<Vec<f64>, EngineError>>()
    })?;
    let fill_s = fill_started.elapsed().as_secs_f64();

    let mut values = vec![0.0; n * n];
    let mut flat = upper.into_iter();
    for i in 0..n {
        for j in i..n {
            let v = flat.next().expect("one value per upper triangle slot");
            values[i * n + j] = v;
            values[j * n + i] = v;
        }
    }

    let mut matrix = GramMatrix {
        n,
        values,
        config,
        timing: GramTiming {
            refine_s,
            index_s,
            fill_s,
            total_s: 0.0,
        },
        normalized: false,
    };
    if config.normalize_gram {
        normalize_gram(&mut matrix)?;
    }
    matrix.timing.total_s = started.elapsed().as_secs_f64();
    Ok(matrix)
}

/// Smallest and largest eigenvalue of a symmetric matrix, with the usual
/// acceptance rule for numerically positive semidefinite kernels.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PsdReport {
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub ok: bool,
}

/// Verifies exact symmetry, then checks that the smallest eigenvalue is no
/// lower than `-tol` times the largest positive eigenvalue.
pub fn check_psd(matrix: &GramMatrix, tol: f64) -> Result<PsdReport, EngineError> {
    let n = matrix.n;
    for i in 0..n {
        for j in (i + 1)..n {
            if matrix.values[i * n + j] != matrix.values[j * n + i] {
                return Err(EngineError::NonSymmetric { i, j });
            }
        }
    }
    if n == 0 {
        return Ok(PsdReport {
            min_eigenvalue: 0.0,
            max_eigenvalue: 0.0,
            ok: true,
        });
    }
    let eigen = DMatrix::from_row_slice(n, n, &matrix.values).symmetric_eigen();
    let min_eigenvalue = eigen.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let max_eigenvalue = eigen
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(PsdReport {
        min_eigenvalue,
        max_eigenvalue,
        ok: min_eigenvalue >= -tol * max_eigenvalue.max(0.0),
    })
}

/// Rescales to unit self-similarity: `K(i,j) / sqrt(K(i,i) K(j,j))`, with
/// the diagonal set to exactly one. Fails on non-positive diagonal entries.
pub fn normalize_gram(matrix: &mut GramMatrix) -> Result<(), EngineError> {
    let n = matrix.n;
    let diagonal: Vec<f64> = (0..n).map(|i| matrix.values[i * n + i]).collect();
    for (index, &value) in diagonal.iter().enumerate() {
        if !value.is_finite() || value <= 0.0 {
            return Err(EngineError::NonPositiveDiagonal { index, value });
        }
    }
    for i in 0..n {
        for j in 0..n {
            matrix.values[i * n + j] = if i == j {
                1.0
            } else {
                matrix.values[i * n + j] / (diagonal[i] * diagonal[j]).sqrt()
            };
        }
    }
    matrix.normalized = true;
    Ok(())
}

/// Cross-validated nearest neighbor accuracy.
#[derive(Debug, Clone, Serialize)]
pub struct KnnReport {
    /// Correct predictions over all graphs.
    pub accuracy: f64,
    pub fold_accuracies: Vec<f64>,
}

/// k-nearest-neighbor classification with stratified cross-validation in
/// kernel-induced distance `d2(i,j) = K(i,i) + K(j,j) - 2 K(i,j)`.
///
/// Folds are dealt round robin after a seeded per-class shuffle, distance
/// ties break on the smaller index and vote ties on the smaller label, so
/// the result is reproducible.
pub fn knn_eval(
    matrix: &GramMatrix,
    labels: &[i64],
    k: usize,
    folds: usize,
    seed: u64,
) -> Result<KnnReport, EngineError> {
    let n = matrix.n;
    if labels.len() != n {
        return Err(EngineError::LabelCount {
            expected: n,
            got: labels.len(),
        });
    }
    if k == 0 {
        return Err(EngineError::BadNeighborCount);
    }
    if folds < 2 || folds > n {
        return Err(EngineError::BadFolds { folds, n });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut by_class: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (index, &class) in labels.iter().enumerate() {
        by_class.entry(class).or_default().push(index);
    }
    let mut fold_of = vec![0usize; n];
    let mut dealt = 0usize;
    for members in by_class.values_mut() {
        members.shuffle(&mut rng);
        for &index in members.iter() {
            fold_of[index] = dealt % folds;
            dealt += 1;
        }
    }

    let mut fold_accuracies = Vec::with_capacity(folds);
    let mut correct_total = 0usize;
    for fold in 0..folds {
        let test: Vec<usize> = (0..n).filter(|&i| fold_of[i] == fold).collect();
        let train: Vec<usize> = (0..n).filter(|&i| fold_of[i] != fold).collect();
        let mut correct = 0usize;
        for &i in &test {
            let mut distances: Vec<(f64, usize)> = train
                .iter()
                .map(|&j| {
                    let d2 = matrix.get(i, i) + matrix.get(j, j) - 2.0 * matrix.get(i, j);
                    (d2, j)
                })
                .collect();
            distances.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let mut votes: BTreeMap<i64, usize> = BTreeMap::new();
            for &(_, j) in distances.iter().take(k) {
                *votes.entry(labels[j]).or_insert(0) += 1;
            }
            let mut winner = i64::MAX;
            let mut best = 0usize;
            for (&label, &count) in &votes {
                if count > best {
                    best = count;
                    winner = label;
                }
            }
            if winner == labels[i] {
                correct += 1;
            }
        }
        fold_accuracies.push(correct as f64 / test.len() as f64);
        correct_total += correct;
    }
    Ok(KnnReport {
        accuracy: correct_total as f64 / n as f64,
        fold_accuracies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::DatasetBuilder;
    use crate::kernels::{np_pair, BaseKernelSpec};
    use approx::assert_relative_eq;

    fn labeled_dataset() -> Dataset {
        crate::synth::generate_synthetic(8, 10, 0.3, 2, 0, 211).unwrap()
    }

    fn attributed_dataset() -> Dataset {
        crate::synth::generate_synthetic(8, 10, 0.3, 2, 2, 223).unwrap()
    }

    #[test]
    fn single_graph_gram_is_the_self_kernel() {
        let ds = crate::synth::generate_synthetic(1, 8, 0.3, 2, 0, 227).unwrap();
        let config = KernelConfig::new(KernelKind::Np);
        let matrix = gram(&ds, &config, &EngineOptions::default()).unwrap();
        assert_eq!(matrix.n, 1);
        let mut dict = ColorDictionary::new();
        let assignments = refine(&ds, config.h, &mut dict);
        let expected = np_pair(
            ds.graph(0),
            &assignments[0],
            ds.graph(0),
            &assignments[0],
            &config,
        )
        .unwrap();
        assert_eq!(matrix.get(0, 0), expected);
    }

    #[test]
    fn schemes_agree_bitwise_on_labels() {
        let ds = labeled_dataset();
        let mut config = KernelConfig::new(KernelKind::Np);
        config.scheme = Scheme::Global;
        let global = gram(&ds, &config, &EngineOptions::default()).unwrap();
        config.scheme = Scheme::Pairwise;
        let pairwise = gram(&ds, &config, &EngineOptions::default()).unwrap();
        assert_eq!(global.values, pairwise.values);
    }

    #[test]
    fn schemes_agree_bitwise_on_attributes() {
        let ds = attributed_dataset();
        let mut config = KernelConfig::new(KernelKind::Np);
        config.base = BaseKernelSpec::Gaussian { beta: 0.5 };
        config.include_level0 = true;
        let global = gram(&ds, &config, &EngineOptions::default()).unwrap();
        config.scheme = Scheme::Pairwise;
        let pairwise = gram(&ds, &config, &EngineOptions::default()).unwrap();
        assert_eq!(global.values, pairwise.values);
    }

    #[test]
    fn global_gram_matches_the_pair_functions() {
        let ds = labeled_dataset();
        let config = KernelConfig::new(KernelKind::Np);
        let matrix = gram(&ds, &config, &EngineOptions::default()).unwrap();
        let mut dict = ColorDictionary::new();
        let assignments = refine(&ds, config.h, &mut dict);
        for i in 0..matrix.n {
            for j in 0..matrix.n {
                let expected = np_pair(
                    ds.graph(i),
                    &assignments[i],
                    ds.graph(j),
                    &assignments[j],
                    &config,
                )
                .unwrap();
                assert_eq!(matrix.get(i, j), expected, "pair ({i}, {j})");
            }
        }
    }

    #[test]
    fn nps_gram_matches_the_pair_function() {
        let ds = attributed_dataset();
        let mut config = KernelConfig::new(KernelKind::Nps);
        config.base = BaseKernelSpec::Gaussian { beta: 0.5 };
        let matrix = gram(&ds, &config, &EngineOptions::default()).unwrap();
        let mut dict = ColorDictionary::new();
        let assignments = refine(&ds, config.h, &mut dict);
        for i in 0..matrix.n {
            for j in i..matrix.n {
                let expected = crate::paths::nps_pair(
                    ds.graph(i),
                    &assignments[i],
                    ds.graph(j),
                    &assignments[j],
                    &config,
                )
                .unwrap();
                assert_eq!(matrix.get(i, j), expected, "pair ({i}, {j})");
            }
        }
    }

    #[test]
    fn worker_count_does_not_change_values() {
        let ds = attributed_dataset();
        let mut config = KernelConfig::new(KernelKind::Np);
        config.base = BaseKernelSpec::Gaussian { beta: 0.5 };
        let one = gram(
            &ds,
            &config,
            &EngineOptions {
                workers: Some(1),
                ..EngineOptions::default()
            },
        )
        .unwrap();
        let many = gram(
            &ds,
            &config,
            &EngineOptions {
                workers: Some(4),
                ..EngineOptions::default()
            },
        )
        .unwrap();
        assert_eq!(one.values, many.values);
    }

    #[test]
    fn tiny_product_budget_is_rejected_with_guidance() {
        let ds = labeled_dataset();
        let mut config = KernelConfig::new(KernelKind::Np);
        config.scheme = Scheme::Pairwise;
        let err = gram(
            &ds,
            &config,
            &EngineOptions {
                product_edge_budget: 1,
                ..EngineOptions::default()
            },
        )
        .unwrap_err();
        let message = err.to_string();
        assert!(message.contains("global scheme"), "{message}");
    }

    #[test]
    fn psd_holds_on_a_small_gram() {
        let ds = labeled_dataset();
        let config = KernelConfig::new(KernelKind::Np);
        let matrix = gram(&ds, &config, &EngineOptions::default()).unwrap();
        let report = check_psd(&matrix, 1e-8).unwrap();
        assert!(report.ok, "min eigenvalue {}", report.min_eigenvalue);
    }

    #[test]
    fn asymmetry_is_rejected() {
        let config = KernelConfig::new(KernelKind::Np);
        let matrix = GramMatrix {
            n: 2,
            values: vec![1.0, 0.5, 0.25, 1.0],
            config,
            timing: GramTiming::default(),
            normalized: false,
        };
        assert!(matches!(
            check_psd(&matrix, 1e-8),
            Err(EngineError::NonSymmetric { i: 0, j: 1 })
        ));
    }

    #[test]
    fn normalization_rescales_off_diagonal_entries() {
        let config = KernelConfig::new(KernelKind::Np);
        let mut matrix = GramMatrix {
            n: 2,
            values: vec![4.0, 3.0, 3.0, 9.0],
            config,
            timing: GramTiming::default(),
            normalized: false,
        };
        normalize_gram(&mut matrix).unwrap();
        assert_eq!(matrix.get(0, 0), 1.0);
        assert_eq!(matrix.get(1, 1), 1.0);
        assert_relative_eq!(matrix.get(0, 1), 0.5, max_relative = 1e-15);
        assert!(matrix.normalized);
    }

    #[test]
    fn normalization_rejects_a_zero_diagonal() {
        let config = KernelConfig::new(KernelKind::Np);
        let mut matrix = GramMatrix {
            n: 2,
            values: vec![0.0, 0.0, 0.0, 1.0],
            config,
            timing: GramTiming::default(),
            normalized: false,
        };
        assert!(matches!(
            normalize_gram(&mut matrix),
            Err(EngineError::NonPositiveDiagonal { index: 0, .. })
        ));
    }

    #[test]
    fn already_normalized_values_stay_put() {
        let ds = labeled_dataset();
        let mut config = KernelConfig::new(KernelKind::Np);
        config.normalize_gram = true;
        let matrix = gram(&ds, &config, &EngineOptions::default()).unwrap();
        let mut again = matrix.clone();
        normalize_gram(&mut again).unwrap();
        for (a, b) in matrix.values.iter().zip(&again.values) {
            assert_relative_eq!(a, b, max_relative = 1e-15);
        }
    }

    #[test]
    fn knn_separates_two_copies_of_distinct_graphs() {
        let mut b = DatasetBuilder::new("copies");
        for _ in 0..5 {
            b.add_graph(&["a", "a", "a"], &[(0, 1), (1, 2), (0, 2)], None, None)
                .unwrap();
        }
        for _ in 0..5 {
            b.add_graph(&["b", "b", "b", "b"], &[(0, 1), (1, 2), (2, 3)], None, None)
                .unwrap();
        }
        let ds = b.build().unwrap();
        let config = KernelConfig::new(KernelKind::Np);
        let mut matrix = gram(&ds, &config, &EngineOptions::default()).unwrap();
        normalize_gram(&mut matrix).unwrap();
        let labels = vec![0, 0, 0, 0, 0, 1, 1, 1, 1, 1];
        let report = knn_eval(&matrix, &labels, 3, 5, 7).unwrap();
        assert_eq!(report.accuracy, 1.0);
        assert_eq!(report.fold_accuracies.len(), 5);
    }

    #[test]
    fn knn_rejects_bad_arguments() {
        let config = KernelConfig::new(KernelKind::Np);
        let matrix = GramMatrix {
            n: 4,
            values: vec![0.0; 16],
            config,
            timing: GramTiming::default(),
            normalized: false,
        };
        assert!(matches!(
            knn_eval(&matrix, &[0, 1], 1, 2, 0),
            Err(EngineError::LabelCount { expected: 4, got: 2 })
        ));
        assert!(matches!(
            knn_eval(&matrix, &[0, 1, 0, 1], 0, 2, 0),
            Err(EngineError::BadNeighborCount)
        ));
        assert!(matches!(
            knn_eval(&matrix, &[0, 1, 0, 1], 1, 1, 0),
            Err(EngineError::BadFolds { folds: 1, n: 4 })
        ));
        assert!(matches!(
            knn_eval(&matrix, &[0, 1, 0, 1], 1, 5, 0),
            Err(EngineError::BadFolds { folds: 5, n: 4 })
        ));
    }

    #[test]
    fn shuffled_labels_score_near_chance() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;

        let ds = crate::synth::generate_synthetic(30, 10, 0.3, 2, 0, 229).unwrap();
        let config = KernelConfig::new(KernelKind::Np);
        let mut matrix = gram(&ds, &config, &EngineOptions::default()).unwrap();
        normalize_gram(&mut matrix).unwrap();
        // Labels drawn independently of structure per trial: the mean
        // accuracy sits just under 0.5 (the test point's own class has one
        // fewer candidate in the training split).
        let mut sum = 0.0;
        let trials = 40u64;
        for trial in 0..trials {
            let mut labels: Vec<i64> = (0..30).map(|i| (i % 2) as i64).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(10_000 + trial);
            labels.shuffle(&mut rng);
            sum += knn_eval(&matrix, &labels, 3, 5, trial).unwrap().accuracy;
        }
        let mean = sum / trials as f64;
        assert!((0.3..0.7).contains(&mean), "mean accuracy {mean}");
    }
}
