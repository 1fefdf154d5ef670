//! Direct product graphs over color-refined node pairs, their projection
//! back onto the factor graphs, and the deduplicated edge pairs the
//! convolution kernel sums over.
//!
//! A product node is a pair of equally colored nodes, one per graph; a
//! product edge joins two product nodes whose constituents are joined by
//! equally labeled edges on both sides. When all four constituent colors
//! coincide the same edge pair induces two product edges; convolution pairs
//! collapse them to one.

use std::collections::{BTreeMap, HashMap};

use crate::graph::{Graph, SymbolId};
use crate::wl::{ColorAssignment, ColorId, EdgeAddress};

/// Direct product of two graphs at one refinement level.
///
/// Nodes are sorted by `(left, right)`; edges are index pairs `(i < j)` into
/// `nodes`, sorted, with the shared constituent edge label alongside.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductGraph {
    pub level: usize,
    pub nodes: Vec<(usize, usize)>,
    /// Color shared by both constituents of each product node at `level`.
    pub node_colors: Vec<ColorId>,
    pub edges: Vec<(usize, usize)>,
    pub edge_labels: Vec<SymbolId>,
}

impl ProductGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

/// One deduplicated edge pair with a shared address. Both edges are stored
/// in the feature-index orientation of their own graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct ConvolutionPair {
    pub address: EdgeAddress,
    pub left: (usize, usize),
    pub right: (usize, usize),
}

/// Builds the level-`level` direct product of two refined graphs.
pub fn build_product(
    gl: &Graph,
    al: &ColorAssignment,
    gr: &Graph,
    ar: &ColorAssignment,
    level: usize,
) -> ProductGraph {
    let mut left_by_color: BTreeMap<ColorId, Vec<usize>> = BTreeMap::new();
    for v in 0..gl.node_count() {
        left_by_color.entry(al.color(level, v)).or_default().push(v);
    }
    let mut right_by_color: BTreeMap<ColorId, Vec<usize>> = BTreeMap::new();
    for v in 0..gr.node_count() {
        right_by_color.entry(ar.color(level, v)).or_default().push(v);
    }

    let mut nodes = Vec::new();
    for (&color, lefts) in &left_by_color {
        if let Some(rights) = right_by_color.get(&color) {
            for &u in lefts {
                for &v in rights {
                    nodes.push((u, v, color));
                }
            }
        }
    }
    nodes.sort_unstable();
    let node_index: HashMap<(usize, usize), usize> = nodes
        .iter()
        .enumerate()
        .map(|(i, &(u, v, _))| ((u, v), i))
        .collect();

    let il = crate::wl::feature_index(gl, al, level);
    let ir = crate::wl::feature_index(gr, ar, level);
    let mut edges: BTreeMap<(usize, usize), SymbolId> = BTreeMap::new();
    for (address, bucket_l) in &il {
        let Some(bucket_r) = ir.get(address) else {
            continue;
        };
        for &(a, b) in bucket_l {
            for &(c, d) in bucket_r {
                // Oriented buckets align c_min with c_min, so (a, c) and
                // (b, d) are equally colored product nodes.
                let mut push = |p: (usize, usize), q: (usize, usize)| {
                    let i = node_index[&p];
                    let j = node_index[&q];
                    edges.insert((i.min(j), i.max(j)), address.edge_label);
                };
                push((a, c), (b, d));
                if address.is_palindromic() {
                    push((a, d), (b, c));
                }
            }
        }
    }

    let (edge_list, edge_labels) = edges.into_iter().unzip();
    ProductGraph {
        level,
        node_colors: nodes.iter().map(|&(_, _, c)| c).collect(),
        nodes: nodes.into_iter().map(|(u, v, _)| (u, v)).collect(),
        edges: edge_list,
        edge_labels,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Edges of one factor graph that survive in the product: the projection of
/// every product edge onto `side`, deduplicated and sorted.
pub fn np_edges(product: &ProductGraph, side: Side) -> Vec<(usize, usize)> {
    let mut projected: Vec<(usize, usize)> = product
        .edges
        .iter()
        .map(|&(i, j)| {
            let (p, q) = (product.nodes[i], product.nodes[j]);
            let (u, v) = match side {
                Side::Left => (p.0, q.0),
                Side::Right => (p.1, q.1),
            };
            (u.min(v), u.max(v))
        })
        .collect();
    projected.sort_unstable();
    projected.dedup();
    projected
}

/// Collapses the product edges to one [`ConvolutionPair`] per unordered edge
/// pair, sorted by `(address, left, right)`.
///
/// A palindromic address induces two product edges for the same pair of
/// constituent edges; keying by the canonically oriented pair keeps exactly
/// one of them.
/// Oriented edges of the left and right factor graph that one convolution
/// pair matches up.
pub type EdgePairing = ((usize, usize), (usize, usize));

pub fn convolution_pairs(product: &ProductGraph) -> Vec<ConvolutionPair> {
    let mut pairs: BTreeMap<EdgePairing, EdgeAddress> = BTreeMap::new();
    for (k, &(i, j)) in product.edges.iter().enumerate() {
        let (ci, cj) = (product.node_colors[i], product.node_colors[j]);
        let ((lu, ru), (lv, rv)) = (product.nodes[i], product.nodes[j]);
        let (left, right) = if ci < cj {
            ((lu, lv), (ru, rv))
        } else if ci > cj {
            ((lv, lu), (rv, ru))
        } else {
            ((lu.min(lv), lu.max(lv)), (ru.min(rv), ru.max(rv)))
        };
        let address = EdgeAddress::new(
            product.level as u32,
            ci,
            product.edge_labels[k],
            cj,
        );
        pairs.insert((left, right), address);
    }
    pairs
        .into_iter()
        .map(|((left, right), address)| ConvolutionPair {
            address,
            left,
            right,
        })
        .collect()
}

/// Ascends the product graph one refinement level: drops every product node
/// whose constituents no longer share a color at `level + 1`, restricts the
/// edges accordingly and renumbers.
///
/// The result equals [`build_product`] at `level + 1`, because refinement
/// only splits color classes and the edge conditions do not depend on the
/// level.
pub fn prune_product(
    product: &ProductGraph,
    al: &ColorAssignment,
    ar: &ColorAssignment,
) -> ProductGraph {
    let level = product.level + 1;
    assert!(
        level <= al.max_level() && level <= ar.max_level(),
        "colors at level {level} are not available"
    );

    let mut keep = vec![usize::MAX; product.node_count()];
    let mut nodes = Vec::new();
    let mut node_colors = Vec::new();
    for (i, &(u, v)) in product.nodes.iter().enumerate() {
        let (cu, cv) = (al.color(level, u), ar.color(level, v));
        if cu == cv {
            keep[i] = nodes.len();
            nodes.push((u, v));
            node_colors.push(cu);
        }
    }

    let mut edges = Vec::new();
    let mut edge_labels = Vec::new();
    for (k, &(i, j)) in product.edges.iter().enumerate() {
        if keep[i] != usize::MAX && keep[j] != usize::MAX {
            edges.push((keep[i], keep[j]));
            edge_labels.push(product.edge_labels[k]);
        }
    }

    ProductGraph {
        level,
        nodes,
        node_colors,
        edges,
        edge_labels,
    }
}

/// Convolution pairs grouped per address with both bucket projections, as
/// the pairwise Gram scheme consumes them. Returns, per address, the sorted
/// pair list plus the distinct left and right edge counts.
pub fn pairs_by_address(
    pairs: &[ConvolutionPair],
) -> BTreeMap<EdgeAddress, (Vec<EdgePairing>, usize, usize)> {
    let mut grouped: BTreeMap<EdgeAddress, Vec<EdgePairing>> = BTreeMap::new();
    for pair in pairs {
        grouped
            .entry(pair.address)
            .or_default()
            .push((pair.left, pair.right));
    }
    grouped
        .into_iter()
        .map(|(address, list)| {
            let lefts: std::collections::BTreeSet<_> = list.iter().map(|p| p.0).collect();
            let rights: std::collections::BTreeSet<_> = list.iter().map(|p| p.1).collect();
            let (nl, nr) = (lefts.len(), rights.len());
            (address, (list, nl, nr))
        })
        .collect()
}

/// Definition-level reconstruction of the product edge count, used to
/// cross-check [`build_product`] in tests: iterates all product node pairs
/// and checks the two factor edges and the label directly.
pub fn count_product_edges_direct(
    gl: &Graph,
    gr: &Graph,
    product: &ProductGraph,
) -> usize {
    let edge_label = |g: &Graph, u: usize, v: usize| -> Option<SymbolId> {
        let key = (u.min(v), u.max(v));
        g.edges()
            .binary_search(&key)
            .ok()
            .map(|i| g.edge_label(i))
    };
    let mut count = 0;
    for i in 0..product.node_count() {
        for j in (i + 1)..product.node_count() {
            let ((u, up), (v, vp)) = (product.nodes[i], product.nodes[j]);
            if let (Some(l), Some(r)) = (edge_label(gl, u, v), edge_label(gr, up, vp)) {
                if l == r {
                    count += 1;
                }
            }
        }
    }
    count
}
