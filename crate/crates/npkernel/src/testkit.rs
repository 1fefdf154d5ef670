//! Deterministic fixtures and graph manipulation helpers for tests and
//! benchmarks.
//!
//! Everything here is seeded or hand built, so two runs always see the same
//! data. The fixtures cover the three regimes the kernels behave differently
//! in: discretely labeled random graphs, attributed random graphs, and small
//! regular structures with heavy color collisions.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{Dataset, DatasetBuilder};
use crate::synth::{generate_synthetic, generate_two_class};

/// An editable plain-text form of one graph, convenient for permuting and
/// regrouping graphs into new datasets.
#[derive(Debug, Clone)]
pub struct RawGraph {
    pub labels: Vec<String>,
    pub edges: Vec<(usize, usize)>,
    pub edge_labels: Option<Vec<String>>,
    pub attributes: Option<Vec<Vec<f64>>>,
}

impl RawGraph {
    pub fn from_dataset(ds: &Dataset, index: usize) -> RawGraph {
        let g = ds.graph(index);
        RawGraph {
            labels: (0..g.node_count())
                .map(|v| ds.node_symbols().resolve(g.node_label(v)).to_string())
                .collect(),
            edges: g.edges().to_vec(),
            edge_labels: g.has_edge_labels().then(|| {
                (0..g.edge_count())
                    .map(|i| ds.edge_symbols().resolve(g.edge_label(i)).to_string())
                    .collect()
            }),
            attributes: g.has_attributes().then(|| {
                (0..g.node_count())
                    .map(|v| g.attributes(v).expect("attributes present").to_vec())
                    .collect()
            }),
        }
    }

    /// Renumbers nodes: node `v` becomes `perm[v]`. Edge labels follow their
    /// edges.
    pub fn permuted(&self, perm: &[usize]) -> RawGraph {
        assert_eq!(perm.len(), self.labels.len());
        let mut labels = vec![String::new(); self.labels.len()];
        for (v, label) in self.labels.iter().enumerate() {
            labels[perm[v]] = label.clone();
        }
        let attributes = self.attributes.as_ref().map(|attrs| {
            let mut moved = vec![Vec::new(); attrs.len()];
            for (v, row) in attrs.iter().enumerate() {
                moved[perm[v]] = row.clone();
            }
            moved
        });
        RawGraph {
            labels,
            edges: self.edges.iter().map(|&(u, v)| (perm[u], perm[v])).collect(),
            edge_labels: self.edge_labels.clone(),
            attributes,
        }
    }
}

/// Builds a dataset from raw graphs; all raws must agree on whether edge
/// labels and attributes are present.
pub fn dataset_from_raws(name: &str, raws: &[RawGraph]) -> Dataset {
    let mut builder = DatasetBuilder::new(name);
    for raw in raws {
        let labels: Vec<&str> = raw.labels.iter().map(String::as_str).collect();
        let edge_labels: Option<Vec<&str>> = raw
            .edge_labels
            .as_ref()
            .map(|ls| ls.iter().map(String::as_str).collect());
        builder
            .add_graph(
                &labels,
                &raw.edges,
                edge_labels.as_deref(),
                raw.attributes.clone(),
            )
            .expect("raw graphs are well formed");
    }
    builder.build().expect("raw datasets are well formed")
}

pub fn random_permutation(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    perm
}

/// Random graphs with discrete labels only: 20 graphs, 15 nodes, three
/// label symbols.
pub fn labeled_fixture() -> Dataset {
    generate_synthetic(20, 15, 0.3, 3, 0, 1101).expect("fixture parameters are valid")
}

/// Random graphs with two label symbols and two dimensional attributes:
/// 15 graphs, 12 nodes.
pub fn attributed_fixture() -> Dataset {
    generate_synthetic(15, 12, 0.35, 2, 2, 2202).expect("fixture parameters are valid")
}

/// Small regular structures whose refinement stabilizes early and whose
/// feature buckets stay large: paths, cycles, stars, cliques, forests.
pub fn structured_fixture() -> Dataset {
    let mut b = DatasetBuilder::new("structured");
    // Paths with alternating labels.
    for n in 2..=6 {
        let labels: Vec<&str> = (0..n).map(|v| if v % 2 == 0 { "a" } else { "b" }).collect();
        let edges: Vec<(usize, usize)> = (0..n - 1).map(|v| (v, v + 1)).collect();
        b.add_graph(&labels, &edges, None, None).expect("path");
    }
    // Uniform cycles.
    for n in 3..=8 {
        let labels = vec!["a"; n];
        let edges: Vec<(usize, usize)> = (0..n).map(|v| (v, (v + 1) % n)).collect();
        b.add_graph(&labels, &edges, None, None).expect("cycle");
    }
    // Stars with a distinct hub.
    for leaves in 3..=6 {
        let mut labels = vec!["a"; leaves + 1];
        labels[0] = "c";
        let edges: Vec<(usize, usize)> = (1..=leaves).map(|v| (0, v)).collect();
        b.add_graph(&labels, &edges, None, None).expect("star");
    }
    // Uniform cliques.
    for n in 3..=5 {
        let labels = vec!["b"; n];
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                edges.push((u, v));
            }
        }
        b.add_graph(&labels, &edges, None, None).expect("clique");
    }
    // Two-component forests.
    b.add_graph(
        &["a", "b", "a", "a", "b", "a"],
        &[(0, 1), (1, 2), (3, 4), (4, 5)],
        None,
        None,
    )
    .expect("forest");
    b.add_graph(
        &["a", "a", "a", "a", "b"],
        &[(0, 1), (1, 2), (2, 3), (3, 0)],
        None,
        None,
    )
    .expect("cycle with an isolated node");
    // A small binary tree.
    b.add_graph(
        &["a", "b", "b", "a", "a", "a", "a"],
        &[(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)],
        None,
        None,
    )
    .expect("tree");
    b.build().expect("structured fixture is well formed")
}

/// The three standard fixtures, in a stable order.
pub fn fixture_datasets() -> Vec<Dataset> {
    vec![labeled_fixture(), attributed_fixture(), structured_fixture()]
}

/// Two-class planted dataset used for classification checks: attributes of
/// the second class are shifted by `mean_shift`.
pub fn planted_fixture(n_graphs: usize, mean_shift: f64, seed: u64) -> Dataset {
    generate_two_class(n_graphs, 12, 0.3, 2, 2, mean_shift, seed)
        .expect("fixture parameters are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fixtures_are_reproducible() {
        let a = fixture_datasets();
        let b = fixture_datasets();
        assert_eq!(a, b);
        assert_eq!(a[0].graphs().len(), 20);
        assert_eq!(a[1].graphs().len(), 15);
        assert!(a[2].graphs().len() <= 30);
    }

    #[test]
    fn structured_fixture_mixes_shapes() {
        let ds = structured_fixture();
        let sizes: Vec<usize> = ds.graphs().iter().map(|g| g.node_count()).collect();
        assert!(sizes.contains(&2));
        assert!(sizes.contains(&8));
        assert!(ds.graphs().iter().any(|g| g.edge_count() == 10));
    }

    #[test]
    fn permutation_round_trips_through_raw_graphs() {
        let ds = attributed_fixture();
        let raw = RawGraph::from_dataset(&ds, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let perm = random_permutation(raw.labels.len(), &mut rng);
        let mut inverse = vec![0usize; perm.len()];
        for (v, &p) in perm.iter().enumerate() {
            inverse[p] = v;
        }
        let there = raw.permuted(&perm);
        let back = there.permuted(&inverse);
        assert_eq!(back.labels, raw.labels);
        assert_eq!(back.attributes, raw.attributes);
        let rebuilt = dataset_from_raws("roundtrip", &[back]);
        assert_eq!(rebuilt.graph(0).edges(), ds.graph(3).edges());
    }

    #[test]
    fn permuted_graph_is_isomorphic_not_equal() {
        let ds = labeled_fixture();
        let raw = RawGraph::from_dataset(&ds, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let perm = random_permutation(raw.labels.len(), &mut rng);
        let moved = raw.permuted(&perm);
        assert_ne!(moved.edges, raw.edges);
        let pair = dataset_from_raws("pair", &[raw, moved]);
        assert_eq!(pair.graph(0).edge_count(), pair.graph(1).edge_count());
    }
}
