//! End-to-end checks of the library's documented guarantees, one test per
//! criterion. Every test prints a `criterion NN PASS/FAIL` line with the
//! measured values next to the pinned tolerance, so a full run doubles as a
//! written acceptance record.

use std::process::Command;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use npkernel::engine::{check_psd, knn_eval, EngineOptions};
use npkernel::gram_io::gram_csv_string;
use npkernel::hierarchy::{build_hierarchy, histogram_intersection, histogram_vector};
use npkernel::kernels::npe_level;
use npkernel::oracle::oracle_report;
use npkernel::product::{build_product, convolution_pairs, prune_product};
use npkernel::testkit::{
    attributed_fixture, dataset_from_raws, fixture_datasets, planted_fixture, random_permutation,
    structured_fixture, RawGraph,
};
use npkernel::wl::{edge_address, feature_index};
use npkernel::{
    gram, generate_synthetic, refine, BaseKernelSpec, ColorAssignment, ColorDictionary, Dataset,
    DatasetBuilder, KernelConfig, KernelKind, Scheme,
};

const SCHEME_REL_TOL: f64 = 1e-9;
const ORACLE_REL_TOL: f64 = 1e-12;
const INVARIANCE_REL_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-8;
const KNN_MIN_ACCURACY: f64 = 0.9;

fn report(criterion: usize, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {criterion:02} {verdict} {detail}");
    assert!(pass, "criterion {criterion:02}: {detail}");
}

/// Relative difference; zero when both values are bitwise equal.
fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn max_rel_err(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| rel_err(x, y))
        .fold(0.0, f64::max)
}

fn refinement(ds: &Dataset, h: usize) -> Vec<ColorAssignment> {
    let mut dict = ColorDictionary::new();
    refine(ds, h, &mut dict)
}

/// `count` deterministic unordered pairs of `0..n`, diagonal included.
fn sample_pairs(n: usize, count: usize, seed: u64) -> Vec<(usize, usize)> {
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i..n).map(move |j| (i, j)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    pairs.shuffle(&mut rng);
    pairs.truncate(count);
    pairs
}

/// Base config used throughout: Gaussian with `beta = 1/d` wherever the
/// dataset has attributes, the unit base otherwise.
fn config_for(ds: &Dataset, kind: KernelKind) -> KernelConfig {
    let mut config = KernelConfig::new(kind);
    let d = ds.attribute_dim().unwrap_or(1);
    config.base = BaseKernelSpec::Gaussian { beta: 1.0 / d as f64 };
    config.resolve_base(ds)
}

#[test]
fn criterion_01_schemes_agree_on_all_fixtures() {
    let started = Instant::now();
    let options = EngineOptions::default();
    let mut worst = 0.0f64;
    let mut npo_exact = true;
    for ds in fixture_datasets() {
        for kind in [KernelKind::Npe, KernelKind::Npo, KernelKind::Np] {
            let mut config = config_for(&ds, kind);
            config.scheme = Scheme::Global;
            let global = gram(&ds, &config, &options).expect("global gram");
            config.scheme = Scheme::Pairwise;
            let pairwise = gram(&ds, &config, &options).expect("pairwise gram");
            match kind {
                KernelKind::Npo => npo_exact &= global.values == pairwise.values,
                _ => worst = worst.max(max_rel_err(&global.values, &pairwise.values)),
            }
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    report(
        1,
        worst <= SCHEME_REL_TOL && npo_exact && elapsed <= 60.0,
        &format!(
            "max rel err {worst:.3e} (tol {SCHEME_REL_TOL:.0e}), counting kernel exact: {npo_exact}, {elapsed:.1} s (limit 60)"
        ),
    );
}

#[test]
fn criterion_02_pair_functions_match_brute_force() {
    let started = Instant::now();
    let mut worst = 0.0f64;
    let mut exact = true;
    // 25 + 25 edge-kernel pairs, 25 + 25 counting pairs, 10 + 10 path pairs
    // across the labeled, attributed and structured fixtures.
    let batches: [(Dataset, KernelKind, usize, usize, usize); 4] = [
        (fixture_datasets().remove(0), KernelKind::Np, 25, 25, 0),
        (attributed_fixture(), KernelKind::Np, 25, 25, 10),
        (structured_fixture(), KernelKind::Nps, 0, 0, 5),
        (attributed_fixture(), KernelKind::Nps, 0, 0, 5),
    ];
    for (i, (ds, kind, npe_count, npo_count, nps_count)) in batches.into_iter().enumerate() {
        let config = config_for(&ds, kind);
        let assignments = refinement(&ds, config.h);
        let n = ds.graphs().len();
        let seed = 900 + i as u64;
        let npe_pairs = sample_pairs(n, npe_count, seed);
        let npo_pairs = sample_pairs(n, npo_count, seed + 50);
        let nps_pairs = sample_pairs(n, nps_count, seed + 100);
        let rep = oracle_report(&ds, &assignments, &config, &npe_pairs, &npo_pairs, &nps_pairs)
            .expect("oracle report");
        worst = worst.max(rep.max_rel_error());
        exact &= rep.overlap_exact();
    }
    let elapsed = started.elapsed().as_secs_f64();
    report(
        2,
        worst <= ORACLE_REL_TOL && exact && elapsed <= 120.0,
        &format!(
            "50/50/20 pairs, max rel err {worst:.3e} (tol {ORACLE_REL_TOL:.0e}), counting kernel exact: {exact}, {elapsed:.1} s (limit 120)"
        ),
    );
}

#[test]
fn criterion_03_self_counting_kernel_is_depth_times_edges() {
    let mut checked = 0usize;
    let mut pass = true;
    for ds in fixture_datasets() {
        let assignments = refinement(&ds, 3);
        for h in 1..=3usize {
            for (g, a) in ds.graphs().iter().zip(&assignments) {
                let value = npkernel::kernels::npo_pair(g, a, g, a, h);
                pass &= value == (h * g.edge_count()) as u64;
                checked += 1;
            }
        }
    }
    report(
        3,
        pass,
        &format!("self overlap equals h * |E| exactly on {checked} graph/depth combinations"),
    );
}

#[test]
fn criterion_04_histogram_intersection_equals_counting_kernel() {
    let mut checked = 0usize;
    let mut pass = true;
    for ds in fixture_datasets() {
        for h in 1..=3usize {
            let assignments = refinement(&ds, h);
            let hierarchy = build_hierarchy(&ds, &assignments, h);
            let histograms: Vec<Vec<u64>> = ds
                .graphs()
                .iter()
                .zip(&assignments)
                .map(|(g, a)| histogram_vector(g, a, &hierarchy).expect("histogram"))
                .collect();
            let n = ds.graphs().len();
            for i in 0..n {
                for j in i..n {
                    let overlap = histogram_intersection(&histograms[i], &histograms[j])
                        .expect("equal lengths");
                    let direct = npkernel::kernels::npo_pair(
                        ds.graph(i),
                        &assignments[i],
                        ds.graph(j),
                        &assignments[j],
                        h,
                    );
                    pass &= overlap == direct;
                    checked += 1;
                }
            }
        }
    }
    report(
        4,
        pass,
        &format!("histogram intersection equals the counting kernel on {checked} pairs, h in 1..=3"),
    );
}

#[test]
fn criterion_05_pruning_equals_rebuilding_next_level() {
    let ds = generate_synthetic(12, 14, 0.3, 4, 0, 501).expect("synthetic dataset");
    let assignments = refinement(&ds, 3);
    let pairs = sample_pairs(ds.graphs().len(), 30, 505);
    let mut checked = 0usize;
    let mut pass = true;
    for &(i, j) in &pairs {
        let (gl, gr) = (ds.graph(i), ds.graph(j));
        let (al, ar) = (&assignments[i], &assignments[j]);
        for level in 0..=2usize {
            let pruned = prune_product(&build_product(gl, al, gr, ar, level), al, ar);
            let rebuilt = build_product(gl, al, gr, ar, level + 1);
            pass &= pruned == rebuilt;
            checked += 1;
        }
    }
    report(
        5,
        pass,
        &format!("prune(level) identical to build(level + 1) on {checked} pair/level combinations"),
    );
}

#[test]
fn criterion_06_convolution_pairs_match_address_matching_edge_pairs() {
    let ds = generate_synthetic(12, 14, 0.3, 4, 0, 601).expect("synthetic dataset");
    let assignments = refinement(&ds, 2);
    let pairs = sample_pairs(ds.graphs().len(), 30, 606);
    let mut pass = true;
    let mut checked = 0usize;
    for &(i, j) in &pairs {
        let (gl, gr) = (ds.graph(i), ds.graph(j));
        let (al, ar) = (&assignments[i], &assignments[j]);
        for level in 1..=2usize {
            let deduplicated = convolution_pairs(&build_product(gl, al, gr, ar, level)).len();
            let mut brute = 0usize;
            for (ei, &(u, v)) in gl.edges().iter().enumerate() {
                let left = edge_address(al, level, u, v, gl.edge_label(ei));
                for (fi, &(x, y)) in gr.edges().iter().enumerate() {
                    if left == edge_address(ar, level, x, y, gr.edge_label(fi)) {
                        brute += 1;
                    }
                }
            }
            pass &= deduplicated == brute;
            checked += 1;
        }
    }

    // Two one-edge graphs with equal endpoint labels: the palindromic address
    // doubles the product edges but still describes a single edge pair.
    let mut b = DatasetBuilder::new("palindrome");
    b.add_graph(&["a", "a"], &[(0, 1)], None, None).expect("left");
    b.add_graph(&["a", "a"], &[(0, 1)], None, None).expect("right");
    let tiny = b.build().expect("two graphs");
    let ta = refinement(&tiny, 1);
    let product = build_product(tiny.graph(0), &ta[0], tiny.graph(1), &ta[1], 1);
    let collapsed = convolution_pairs(&product).len();
    pass &= product.edge_count() == 2 && collapsed == 1;
    report(
        6,
        pass,
        &format!(
            "deduplicated pairs equal brute counts on {checked} pair/level combinations; palindromic single-edge pair: {} product edges -> {} pair",
            product.edge_count(),
            collapsed
        ),
    );
}

#[test]
fn criterion_07_combined_kernel_gram_is_positive_semidefinite() {
    let ds = generate_synthetic(30, 15, 0.3, 3, 2, 701).expect("attributed dataset");
    let options = EngineOptions::default();
    let mut worst_ratio = f64::INFINITY;
    let mut pass = true;
    for alpha in [0.0, 0.5, 1.0] {
        let mut config = config_for(&ds, KernelKind::Np);
        config.alpha = alpha;
        let matrix = gram(&ds, &config, &options).expect("gram");
        let psd = check_psd(&matrix, PSD_TOL).expect("symmetric matrix");
        worst_ratio = worst_ratio.min(psd.min_eigenvalue / psd.max_eigenvalue);
        pass &= psd.ok;
    }
    report(
        7,
        pass,
        &format!(
            "30 attributed graphs, alpha in {{0, 0.5, 1}}: min eigenvalue ratio {worst_ratio:.2e} (tolerance -{PSD_TOL:.0e})"
        ),
    );
}

#[test]
fn criterion_08_kernels_are_invariant_under_node_renumbering() {
    let options = EngineOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut worst = 0.0f64;
    let mut counting_exact = true;
    for ds in [attributed_fixture(), structured_fixture()] {
        let raws: Vec<RawGraph> = (0..ds.graphs().len())
            .map(|i| RawGraph::from_dataset(&ds, i))
            .collect();
        for kind in [KernelKind::Npo, KernelKind::Np, KernelKind::Nps] {
            let config = config_for(&ds, kind);
            let baseline = gram(&ds, &config, &options).expect("baseline gram");
            for _ in 0..10 {
                let permuted: Vec<RawGraph> = raws
                    .iter()
                    .map(|raw| {
                        raw.permuted(&random_permutation(raw.labels.len(), &mut rng))
                    })
                    .collect();
                let shuffled = dataset_from_raws(ds.name(), &permuted);
                let config = config_for(&shuffled, kind);
                let renumbered = gram(&shuffled, &config, &options).expect("renumbered gram");
                match kind {
                    KernelKind::Npo => {
                        counting_exact &= baseline.values == renumbered.values;
                    }
                    _ => worst = worst.max(max_rel_err(&baseline.values, &renumbered.values)),
                }
            }
        }
    }
    report(
        8,
        worst <= INVARIANCE_REL_TOL && counting_exact,
        &format!(
            "10 renumberings per graph: counting kernel exact: {counting_exact}, others max rel err {worst:.3e} (tol {INVARIANCE_REL_TOL:.0e})"
        ),
    );
}

#[test]
fn criterion_09_unit_base_level_values_count_shared_addresses() {
    let mut checked = 0usize;
    let mut pass = true;
    for ds in fixture_datasets() {
        let assignments = refinement(&ds, 2);
        let n = ds.graphs().len();
        for level in 1..=2usize {
            let indexes: Vec<_> = ds
                .graphs()
                .iter()
                .zip(&assignments)
                .map(|(g, a)| feature_index(g, a, level))
                .collect();
            for i in 0..n {
                for j in i..n {
                    let shared = indexes[i]
                        .keys()
                        .filter(|address| indexes[j].contains_key(address))
                        .count();
                    let value = npe_level(
                        &BaseKernelSpec::Unit,
                        ds.graph(i),
                        &indexes[i],
                        ds.graph(j),
                        &indexes[j],
                    )
                    .expect("unit base never fails");
                    pass &= value == shared as f64;
                    checked += 1;
                }
            }
        }
    }
    report(
        9,
        pass,
        &format!("unit-base level values equal shared address counts on {checked} pair/level combinations"),
    );
}

#[test]
fn criterion_10_scheme_runtimes_cross_over_with_address_count() {
    let started = Instant::now();
    let dir = tempfile::tempdir().expect("tempdir");
    let out = dir.path().join("bench.csv");
    let status = Command::new(env!("CARGO_BIN_EXE_npkernel"))
        .args([
            "bench",
            "--graphs",
            "30",
            "--nodes",
            "60",
            "--densities",
            "0.1,0.2,0.3,0.4",
            "--labels",
            "2,3,4",
            "--h",
            "1",
            "--repeats",
            "3",
            "--seed",
            "99",
            "--output",
        ])
        .arg(&out)
        .status()
        .expect("bench run");
    assert!(status.success(), "bench exited with {status}");
    let csv = std::fs::read_to_string(&out).expect("bench csv");
    let rows: Vec<(u64, f64, f64)> = csv
        .lines()
        .skip(1)
        .map(|line| {
            let cells: Vec<&str> = line.split(',').collect();
            let lambda: u64 = cells[3].parse().expect("address count");
            let pairwise: f64 = cells[4].parse().expect("pairwise seconds");
            let global: f64 = cells[5].parse().expect("global seconds");
            (lambda, pairwise, global)
        })
        .collect();
    assert_eq!(rows.len(), 12, "expected one row per grid cell");
    let &(min_lambda, min_pairwise, min_global) =
        rows.iter().min_by_key(|r| r.0).expect("rows");
    let &(max_lambda, max_pairwise, max_global) =
        rows.iter().max_by_key(|r| r.0).expect("rows");
    let elapsed = started.elapsed().as_secs_f64();
    report(
        10,
        min_global < min_pairwise && max_pairwise < max_global && elapsed <= 600.0,
        &format!(
            "smallest address list ({min_lambda}): global {min_global:.3} s vs pairwise {min_pairwise:.3} s; largest ({max_lambda}): pairwise {max_pairwise:.3} s vs global {max_global:.3} s; {elapsed:.0} s (limit 600)"
        ),
    );
}

#[test]
fn criterion_11_planted_classes_are_recovered_by_nearest_neighbors() {
    let started = Instant::now();
    let ds = planted_fixture(60, 2.0, 1111);
    let mut config = config_for(&ds, KernelKind::Np);
    config.alpha = 1.0;
    // Unit diagonal, as for any classifier on a precomputed kernel; the raw
    // self kernel otherwise dominates the induced distance.
    config.normalize_gram = true;
    let matrix = gram(&ds, &config, &EngineOptions::default()).expect("gram");
    let labels = ds.class_labels().expect("planted classes");
    let rep = knn_eval(&matrix, labels, 3, 5, 1212).expect("cross validation");
    let elapsed = started.elapsed().as_secs_f64();
    report(
        11,
        rep.accuracy >= KNN_MIN_ACCURACY && elapsed <= 60.0,
        &format!(
            "3-nearest-neighbor accuracy {:.3} over 5 folds (minimum {KNN_MIN_ACCURACY}), {elapsed:.1} s (limit 60)",
            rep.accuracy
        ),
    );
}

#[test]
fn criterion_12_worker_count_never_changes_csv_bytes() {
    let options_single = EngineOptions {
        workers: Some(1),
        ..EngineOptions::default()
    };
    let options_many = EngineOptions {
        workers: Some(4),
        ..EngineOptions::default()
    };
    let mut pass = true;
    let mut bytes = 0usize;
    for ds in fixture_datasets() {
        for scheme in [Scheme::Global, Scheme::Pairwise] {
            let mut config = config_for(&ds, KernelKind::Np);
            config.scheme = scheme;
            let single = gram_csv_string(&gram(&ds, &config, &options_single).expect("gram"));
            let many = gram_csv_string(&gram(&ds, &config, &options_many).expect("gram"));
            pass &= single == many;
            bytes = bytes.max(single.len());
        }
    }
    report(
        12,
        pass,
        &format!("1 and 4 workers render byte-identical CSVs for both schemes on all fixtures (largest {bytes} bytes)"),
    );
}
