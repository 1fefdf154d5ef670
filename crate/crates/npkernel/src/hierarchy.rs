//! Refinement hierarchy over edge addresses and the histogram form of the
//! counting kernel.
//!
//! Addresses at level 1 are roots; the level-`l+1` address of an edge hangs
//! under its level-`l` address. Counting each edge once per level along its
//! leaf-to-root walk yields a per-graph histogram whose coordinate-wise
//! minimum against another graph's histogram equals the counting kernel
//! summed over levels `1..=h`.

use std::collections::HashMap;

use crate::graph::{Dataset, Graph};
use crate::kernels::KernelError;
use crate::wl::{edge_address, ColorAssignment, EdgeAddress};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HierarchyNode {
    pub address: EdgeAddress,
    /// Index of the level-`l-1` node above this one; `None` for roots.
    pub parent: Option<usize>,
}

/// Tree (forest) of every edge address occurring in a dataset for levels
/// `1..=h`, with one node per distinct address.
#[derive(Debug, Clone)]
pub struct Hierarchy {
    nodes: Vec<HierarchyNode>,
    index: HashMap<EdgeAddress, usize>,
    h: usize,
}

impl Hierarchy {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, i: usize) -> &HierarchyNode {
        &self.nodes[i]
    }

    pub fn nodes(&self) -> &[HierarchyNode] {
        &self.nodes
    }

    pub fn lookup(&self, address: &EdgeAddress) -> Option<usize> {
        self.index.get(address).copied()
    }

    pub fn depth(&self) -> usize {
        self.h
    }

    pub fn roots(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].parent.is_none())
    }
}

/// Builds the address hierarchy of `dataset` for levels `1..=h`.
///
/// The parent of a level-`l+1` address is well defined: two edges sharing an
/// address at level `l+1` share their address at level `l`, because colors
/// refine injectively level over level.
pub fn build_hierarchy(
    dataset: &Dataset,
    assignments: &[ColorAssignment],
    h: usize,
) -> Hierarchy {
    let mut hierarchy = Hierarchy {
        nodes: Vec::new(),
        index: HashMap::new(),
        h,
    };
    for (g, assignment) in dataset.graphs().iter().zip(assignments) {
        for (i, &(u, v)) in g.edges().iter().enumerate() {
            let mut parent: Option<usize> = None;
            for level in 1..=h {
                let address = edge_address(assignment, level, u, v, g.edge_label(i));
                let next_id = hierarchy.nodes.len();
                let id = *hierarchy.index.entry(address).or_insert(next_id);
                if id == next_id {
                    hierarchy.nodes.push(HierarchyNode { address, parent });
                } else {
                    debug_assert_eq!(hierarchy.nodes[id].parent, parent);
                }
                parent = Some(id);
            }
        }
    }
    hierarchy
}

/// Histogram of `g` over the hierarchy: every edge increments each node on
/// the walk from its level-`h` address up to the root.
pub fn histogram_vector(
    g: &Graph,
    assignment: &ColorAssignment,
    hierarchy: &Hierarchy,
) -> Result<Vec<u64>, KernelError> {
    let mut histogram = vec![0u64; hierarchy.len()];
    for (i, &(u, v)) in g.edges().iter().enumerate() {
        let leaf = edge_address(assignment, hierarchy.depth(), u, v, g.edge_label(i));
        let mut cursor = hierarchy.lookup(&leaf).ok_or(KernelError::UnknownAddress {
            level: leaf.level,
        })?;
        loop {
            histogram[cursor] += 1;
            match hierarchy.node(cursor).parent {
                Some(parent) => cursor = parent,
                None => break,
            }
        }
    }
    Ok(histogram)
}

/// Coordinate-wise minimum overlap of two histograms.
pub fn histogram_intersection(left: &[u64], right: &[u64]) -> Result<u64, KernelError> {
    if left.len() != right.len() {
        return Err(KernelError::HistogramLength {
            left: left.len(),
            right: right.len(),
        });
    }
    Ok(left.iter().zip(right).map(|(&a, &b)| a.min(b)).sum())
}
