//! Weisfeiler-Leman color refinement shared across a whole dataset, plus the
//! per-level edge addressing and feature index the kernels are built on.
//!
//! Colors are compressed through one injective dictionary for all graphs, so
//! two nodes anywhere in the dataset carry the same color id at level `l`
//! exactly when their refinement signatures agree. Ids for the signatures
//! that first appear at a level are handed out in a canonical order (level 0
//! by raw label text, later levels by signature content), which makes color
//! ids, and everything derived from them, independent of node numbering.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;

use crate::graph::{Dataset, Graph, SymbolId};

pub type ColorId = u32;

/// Refinement signature of one node at one level.
///
/// `Label` wraps the raw node label at level 0; `Refined` is the usual pair
/// of the node's previous color and the sorted multiset of its neighbors'
/// previous colors. The two variants can never collide in the dictionary.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Signature {
    Label(SymbolId),
    Refined { own: ColorId, neighbors: Vec<ColorId> },
}

/// Injective map from signatures to compact color ids, shared by every graph
/// of the dataset that is being refined.
#[derive(Debug, Clone, Default)]
pub struct ColorDictionary {
    ids: HashMap<Signature, ColorId>,
    next: ColorId,
}

impl ColorDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of distinct colors handed out so far, across all levels.
    pub fn len(&self) -> usize {
        self.next as usize
    }

    pub fn is_empty(&self) -> bool {
        self.next == 0
    }

    pub fn get(&self, signature: &Signature) -> Option<ColorId> {
        self.ids.get(signature).copied()
    }

    fn assign(&mut self, signature: Signature) -> ColorId {
        *self.ids.entry(signature).or_insert_with(|| {
            let id = self.next;
            self.next += 1;
            id
        })
    }
}

/// Per-graph color table, indexed `[level][node]` for levels `0..=h`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorAssignment {
    levels: Vec<Vec<ColorId>>,
}

impl ColorAssignment {
    pub fn color(&self, level: usize, node: usize) -> ColorId {
        self.levels[level][node]
    }

    pub fn level(&self, level: usize) -> &[ColorId] {
        &self.levels[level]
    }

    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn node_count(&self) -> usize {
        self.levels.first().map_or(0, Vec::len)
    }
}

/// Runs `h` rounds of color refinement over every graph of `dataset` through
/// the shared `dict`. Level 0 embeds the original node labels.
///
/// Signature construction is parallel across graphs; dictionary assignment is
/// sequential per level so ids stay deterministic.
pub fn refine(dataset: &Dataset, h: usize, dict: &mut ColorDictionary) -> Vec<ColorAssignment> {
    let graphs = dataset.graphs();

    // Level 0: canonical order over distinct raw labels is label-text order.
    let mut label_syms: Vec<SymbolId> = graphs
        .iter()
        .flat_map(|g| g.node_labels().iter().copied())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    label_syms.sort_by(|&a, &b| {
        dataset
            .node_symbols()
            .resolve(a)
            .cmp(dataset.node_symbols().resolve(b))
    });
    for sym in label_syms {
        dict.assign(Signature::Label(sym));
    }

    let mut assignments: Vec<ColorAssignment> = graphs
        .iter()
        .map(|g| {
            let colors = g
                .node_labels()
                .iter()
                .map(|&sym| {
                    dict.get(&Signature::Label(sym))
                        .expect("all level-0 labels were assigned")
                })
                .collect();
            ColorAssignment {
                levels: vec![colors],
            }
        })
        .collect();

    for level in 1..=h {
        let signatures: Vec<Vec<Signature>> = graphs
            .par_iter()
            .zip(assignments.par_iter())
            .map(|(g, assignment)| {
                let prev = assignment.level(level - 1);
                (0..g.node_count())
                    .map(|v| {
                        let mut neighbors: Vec<ColorId> =
                            g.neighbors(v).iter().map(|&u| prev[u]).collect();
                        neighbors.sort_unstable();
                        Signature::Refined {
                            own: prev[v],
                            neighbors,
                        }
                    })
                    .collect()
            })
            .collect();

        // Canonical order over the signatures new to this level.
        let fresh: BTreeSet<&Signature> = signatures
            .iter()
            .flatten()
            .filter(|s| dict.get(s).is_none())
            .collect();
        for signature in fresh {
            dict.assign(signature.clone());
        }

        for (assignment, sigs) in assignments.iter_mut().zip(&signatures) {
            let colors = sigs
                .iter()
                .map(|s| dict.get(s).expect("level signatures were assigned"))
                .collect();
            assignment.levels.push(colors);
        }
    }
    assignments
}

/// Canonical address of one refined edge: the endpoint colors sorted so that
/// `c_min <= c_max`, the edge label between them, tagged with the level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeAddress {
    pub level: u32,
    pub c_min: ColorId,
    pub edge_label: SymbolId,
    pub c_max: ColorId,
}

impl EdgeAddress {
    pub fn new(level: u32, a: ColorId, edge_label: SymbolId, b: ColorId) -> Self {
        EdgeAddress {
            level,
            c_min: a.min(b),
            edge_label,
            c_max: a.max(b),
        }
    }

    /// Both endpoints carry the same color.
    pub fn is_palindromic(&self) -> bool {
        self.c_min == self.c_max
    }
}

/// Address of the edge `(u, v)` under `assignment` at `level`.
pub fn edge_address(
    assignment: &ColorAssignment,
    level: usize,
    u: usize,
    v: usize,
    edge_label: SymbolId,
) -> EdgeAddress {
    EdgeAddress::new(
        level as u32,
        assignment.color(level, u),
        edge_label,
        assignment.color(level, v),
    )
}

/// Buckets of a graph's edges keyed by their level-`l` address. Each stored
/// edge is oriented so its first endpoint carries `c_min` (ties broken toward
/// the smaller node index); buckets are sorted by that oriented pair.
pub type FeatureIndex = BTreeMap<EdgeAddress, Vec<(usize, usize)>>;

/// Orientation used inside feature-index buckets and convolution pairs.
pub fn orient_edge(
    assignment: &ColorAssignment,
    level: usize,
    u: usize,
    v: usize,
) -> (usize, usize) {
    let (cu, cv) = (assignment.color(level, u), assignment.color(level, v));
    if cu < cv || (cu == cv && u < v) {
        (u, v)
    } else {
        (v, u)
    }
}

pub fn feature_index(g: &Graph, assignment: &ColorAssignment, level: usize) -> FeatureIndex {
    let mut index = FeatureIndex::new();
    for (i, &(u, v)) in g.edges().iter().enumerate() {
        let address = edge_address(assignment, level, u, v, g.edge_label(i));
        index
            .entry(address)
            .or_default()
            .push(orient_edge(assignment, level, u, v));
    }
    for bucket in index.values_mut() {
        bucket.sort_unstable();
    }
    index
}

/// Feature index of every graph at `level`, in dataset order.
pub fn dataset_index(
    dataset: &Dataset,
    assignments: &[ColorAssignment],
    level: usize,
) -> Vec<FeatureIndex> {
    dataset
        .graphs()
        .par_iter()
        .zip(assignments.par_iter())
        .map(|(g, a)| feature_index(g, a, level))
        .collect()
}

/// Union of the addresses appearing in `indexes`.
pub fn address_union(indexes: &[FeatureIndex]) -> BTreeSet<EdgeAddress> {
    indexes
        .iter()
        .flat_map(|index| index.keys().copied())
        .collect()
}

/// Number of distinct edge addresses over `levels` across the dataset.
pub fn count_distinct_addresses(
    dataset: &Dataset,
    assignments: &[ColorAssignment],
    levels: impl IntoIterator<Item = usize>,
) -> usize {
    let mut seen = BTreeSet::new();
    for level in levels {
        for (g, a) in dataset.graphs().iter().zip(assignments) {
            for (i, &(u, v)) in g.edges().iter().enumerate() {
                seen.insert(edge_address(a, level, u, v, g.edge_label(i)));
            }
        }
    }
    seen.len()
}

/// Plain-text dump of every color, one `graph level node color` row per line.
pub fn dump_colorings(assignments: &[ColorAssignment]) -> String {
    let mut out = String::new();
    for (gid, assignment) in assignments.iter().enumerate() {
        for level in 0..=assignment.max_level() {
            for node in 0..assignment.node_count() {
                out.push_str(&format!(
                    "{gid} {level} {node} {}\n",
                    assignment.color(level, node)
                ));
            }
        }
    }
    out
}
