//! Seed-deterministic random graph generation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Dataset, DatasetBuilder};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SynthError {
    #[error("graph count must be positive")]
    NoGraphs,
    #[error("node count {0} is too small, need at least 2")]
    TooFewNodes(usize),
    #[error("density {0} must lie in (0, 1]")]
    BadDensity(String),
    #[error("label alphabet must be non-empty")]
    EmptyAlphabet,
    #[error("density {density} on {nodes} nodes rounds to zero edges")]
    NoEdges { density: String, nodes: usize },
    #[error("two-class generation requires a positive attribute dimension")]
    NoAttributes,
}

fn check_params(
    n_graphs: usize,
    n_nodes: usize,
    density: f64,
    alphabet: usize,
) -> Result<usize, SynthError> {
    if n_graphs == 0 {
        return Err(SynthError::NoGraphs);
    }
    if n_nodes < 2 {
        return Err(SynthError::TooFewNodes(n_nodes));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(SynthError::BadDensity(density.to_string()));
    }
    if alphabet == 0 {
        return Err(SynthError::EmptyAlphabet);
    }
    let possible = n_nodes * (n_nodes - 1) / 2;
    let m = (density * possible as f64).round() as usize;
    if m == 0 {
        return Err(SynthError::NoEdges {
            density: density.to_string(),
            nodes: n_nodes,
        });
    }
    Ok(m)
}

// Pair with rank k in the row-major enumeration of all u < v pairs.
fn unrank_pair(n: usize, mut k: usize) -> (usize, usize) {
    for u in 0..n {
        let row = n - 1 - u;
        if k < row {
            return (u, u + 1 + k);
        }
        k -= row;
    }
    unreachable!("pair rank out of range");
}

type SampledGraph = (Vec<(usize, usize)>, Vec<String>, Option<Vec<Vec<f64>>>);

fn sample_graph(
    rng: &mut ChaCha8Rng,
    n_nodes: usize,
    n_edges: usize,
    alphabet: usize,
    attribute_dim: usize,
) -> SampledGraph {
    let possible = n_nodes * (n_nodes - 1) / 2;
    let mut picks = rand::seq::index::sample(rng, possible, n_edges).into_vec();
    picks.sort_unstable();
    let edges: Vec<(usize, usize)> = picks.into_iter().map(|k| unrank_pair(n_nodes, k)).collect();

    let labels: Vec<String> = (0..n_nodes)
        .map(|_| rng.gen_range(0..alphabet).to_string())
        .collect();

    let attrs = (attribute_dim > 0).then(|| {
        (0..n_nodes)
            .map(|_| (0..attribute_dim).map(|_| rng.gen::<f64>()).collect())
            .collect()
    });

    (edges, labels, attrs)
}

/// Generates `n_graphs` random graphs with exactly
/// `round(density * n_nodes * (n_nodes - 1) / 2)` distinct edges each,
/// i.i.d. uniform node labels from `{0, .., label_alphabet - 1}` and, when
/// `attribute_dim > 0`, i.i.d. uniform `[0, 1)` attribute vectors.
///
/// The same seed always yields a bit-identical dataset.
pub fn generate_synthetic(
    n_graphs: usize,
    n_nodes: usize,
    density: f64,
    label_alphabet: usize,
    attribute_dim: usize,
    seed: u64,
) -> Result<Dataset, SynthError> {
    let n_edges = check_params(n_graphs, n_nodes, density, label_alphabet)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut builder = DatasetBuilder::new(&format!("synthetic-{seed}"));
    for _ in 0..n_graphs {
        let (edges, labels, attrs) =
            sample_graph(&mut rng, n_nodes, n_edges, label_alphabet, attribute_dim);
        let label_refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        builder
            .add_graph(&label_refs, &edges, None, attrs)
            .expect("sampled graph is structurally valid");
    }
    Ok(builder.build().expect("no class labels to mismatch"))
}

/// Two-class variant of [`generate_synthetic`] for classifier smoke tests:
/// the first half of the graphs keeps uniform `[0, 1)` attributes, the second
/// half gets `mean_shift` added to every attribute coordinate. Class labels
/// are 0 and 1.
pub fn generate_two_class(
    n_graphs: usize,
    n_nodes: usize,
    density: f64,
    label_alphabet: usize,
    attribute_dim: usize,
    mean_shift: f64,
    seed: u64,
) -> Result<Dataset, SynthError> {
    if attribute_dim == 0 {
        return Err(SynthError::NoAttributes);
    }
    let n_edges = check_params(n_graphs, n_nodes, density, label_alphabet)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut builder = DatasetBuilder::new(&format!("planted-{seed}"));
    let mut classes = Vec::with_capacity(n_graphs);
    for g in 0..n_graphs {
        let class = (g >= n_graphs / 2) as i64;
        let (edges, labels, attrs) =
            sample_graph(&mut rng, n_nodes, n_edges, label_alphabet, attribute_dim);
        let attrs = attrs.map(|rows: Vec<Vec<f64>>| {
            rows.into_iter()
                .map(|row| {
                    row.into_iter()
                        .map(|x| x + mean_shift * class as f64)
                        .collect()
                })
                .collect()
        });
        let label_refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        builder
            .add_graph(&label_refs, &edges, None, attrs)
            .expect("sampled graph is structurally valid");
        classes.push(class);
    }
    builder.set_class_labels(classes);
    Ok(builder.build().expect("class labels match graph count"))
}
