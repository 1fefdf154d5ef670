//! Canonical shortest paths and the path-level kernel.
//!
//! Every unordered node pair of a graph contributes at most one path: among
//! all shortest paths between the endpoints, in both directions, the one
//! whose interleaved sequence of node colors and edge labels is
//! lexicographically smallest. Selecting by sequence content rather than by
//! node index keeps the extracted path set, and every kernel built on it,
//! stable under node renumbering; ties beyond the sequence are irrelevant
//! because tied paths share endpoints and addresses at every level.
//!
//! Two paths match when they have equal length, equal color sequences and
//! equal edge label sequences; matched paths contribute the base-kernel
//! similarity of their sources times that of their sinks.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::graph::{Graph, SymbolId};
use crate::kernels::{BaseKernelSpec, KernelConfig, KernelError};
use crate::wl::{ColorAssignment, ColorId};

/// A selected shortest path, stored in its canonical direction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CanonicalPath {
    pub nodes: Vec<usize>,
}

impl CanonicalPath {
    /// Number of edges on the path.
    pub fn length(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn source(&self) -> usize {
        self.nodes[0]
    }

    pub fn sink(&self) -> usize {
        *self.nodes.last().expect("paths have at least two nodes")
    }
}

/// Level-tagged matching key of a path: node colors and edge labels in the
/// orientation chosen by [`path_address`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathAddress {
    pub level: u32,
    pub colors: Vec<ColorId>,
    pub edge_labels: Vec<SymbolId>,
}

impl PathAddress {
    /// The address reads the same in both directions.
    pub fn is_palindromic(&self) -> bool {
        let rc: Vec<ColorId> = self.colors.iter().rev().copied().collect();
        let rl: Vec<SymbolId> = self.edge_labels.iter().rev().copied().collect();
        self.colors == rc && self.edge_labels == rl
    }
}

/// Compares two equal-length (colors, labels) sequences in interleaved
/// order: `c0, l0, c1, l1, .., cn`.
fn interleaved_cmp(
    ca: &[ColorId],
    la: &[SymbolId],
    cb: &[ColorId],
    lb: &[SymbolId],
) -> Ordering {
    debug_assert_eq!(ca.len(), cb.len());
    match ca[0].cmp(&cb[0]) {
        Ordering::Equal => {}
        other => return other,
    }
    for i in 0..la.len() {
        match la[i].cmp(&lb[i]).then(ca[i + 1].cmp(&cb[i + 1])) {
            Ordering::Equal => {}
            other => return other,
        }
    }
    Ordering::Equal
}

fn label_between(g: &Graph, u: usize, v: usize) -> SymbolId {
    let key = (u.min(v), u.max(v));
    let i = g
        .edges()
        .binary_search(&key)
        .expect("consecutive path nodes are adjacent");
    g.edge_label(i)
}

fn bfs_distances(g: &Graph, source: usize) -> Vec<u32> {
    let mut dist = vec![u32::MAX; g.node_count()];
    dist[source] = 0;
    let mut queue = std::collections::VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        for &v in g.neighbors(u) {
            if dist[v] == u32::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Greedy walk over the shortest-path lattice from `s` to `t`: keeps the set
/// of nodes reachable under the lexicographically smallest interleaved
/// sequence prefix and extends it one layer at a time. Returns the sequence
/// and one representative path.
fn min_sequence_path(
    g: &Graph,
    assignment: &ColorAssignment,
    level: usize,
    ds: &[u32],
    dt: &[u32],
    s: usize,
    t: usize,
) -> (Vec<ColorId>, Vec<SymbolId>, Vec<usize>) {
    let d = ds[t];
    let mut colors = vec![assignment.color(level, s)];
    let mut labels = Vec::with_capacity(d as usize);
    let mut frontier = vec![s];
    let mut preds: Vec<BTreeMap<usize, usize>> = Vec::with_capacity(d as usize);

    for k in 0..d {
        let mut best: Option<(SymbolId, ColorId)> = None;
        let mut step: BTreeMap<usize, usize> = BTreeMap::new();
        for &u in &frontier {
            for &v in g.neighbors(u) {
                if ds[v] != k + 1 || dt[v] != d - k - 1 {
                    continue;
                }
                let key = (label_between(g, u, v), assignment.color(level, v));
                match best {
                    Some(b) if b < key => continue,
                    Some(b) if b == key => {
                        step.entry(v).or_insert(u);
                    }
                    _ => {
                        best = Some(key);
                        step.clear();
                        step.insert(v, u);
                    }
                }
            }
        }
        let (label, color) = best.expect("shortest path layers are never empty");
        labels.push(label);
        colors.push(color);
        frontier = step.keys().copied().collect();
        preds.push(step);
    }

    let mut nodes = vec![t];
    for step in preds.iter().rev() {
        let head = *nodes.last().expect("path under construction is non-empty");
        nodes.push(step[&head]);
    }
    nodes.reverse();
    (colors, labels, nodes)
}

/// Extracts the canonical shortest path of every connected unordered node
/// pair of `g` with length at most `max_len` (no limit when `None`).
///
/// Selection compares interleaved (color, label) sequences at `level`, which
/// is normally the deepest refinement level in use.
pub fn extract_paths(
    g: &Graph,
    assignment: &ColorAssignment,
    level: usize,
    max_len: Option<usize>,
) -> Vec<CanonicalPath> {
    let limit = max_len.unwrap_or(usize::MAX);
    let dist: Vec<Vec<u32>> = (0..g.node_count()).map(|s| bfs_distances(g, s)).collect();
    let mut paths = Vec::new();
    for s in 0..g.node_count() {
        for t in (s + 1)..g.node_count() {
            let d = dist[s][t];
            if d == 0 || d == u32::MAX || d as usize > limit {
                continue;
            }
            let (fc, fl, fnodes) =
                min_sequence_path(g, assignment, level, &dist[s], &dist[t], s, t);
            let (rc, rl, rnodes) =
                min_sequence_path(g, assignment, level, &dist[t], &dist[s], t, s);
            let nodes = match interleaved_cmp(&fc, &fl, &rc, &rl) {
                Ordering::Less | Ordering::Equal => fnodes,
                Ordering::Greater => rnodes,
            };
            paths.push(CanonicalPath { nodes });
        }
    }
    paths
}

/// Address of `path` at `level` plus its endpoints in the chosen
/// orientation: the direction whose interleaved sequence is smaller, the
/// stored direction on a tie.
pub fn path_address(
    g: &Graph,
    path: &CanonicalPath,
    assignment: &ColorAssignment,
    level: usize,
) -> (PathAddress, (usize, usize)) {
    let colors: Vec<ColorId> = path
        .nodes
        .iter()
        .map(|&v| assignment.color(level, v))
        .collect();
    let labels: Vec<SymbolId> = path
        .nodes
        .windows(2)
        .map(|w| label_between(g, w[0], w[1]))
        .collect();
    let rc: Vec<ColorId> = colors.iter().rev().copied().collect();
    let rl: Vec<SymbolId> = labels.iter().rev().copied().collect();
    let (colors, labels, endpoints) = match interleaved_cmp(&colors, &labels, &rc, &rl) {
        Ordering::Less | Ordering::Equal => (colors, labels, (path.source(), path.sink())),
        Ordering::Greater => (rc, rl, (path.sink(), path.source())),
    };
    (
        PathAddress {
            level: level as u32,
            colors,
            edge_labels: labels,
        },
        endpoints,
    )
}

/// Buckets of oriented path endpoints keyed by their level-`l` address.
pub type PathIndex = BTreeMap<PathAddress, Vec<(usize, usize)>>;

pub fn path_index(
    g: &Graph,
    paths: &[CanonicalPath],
    assignment: &ColorAssignment,
    level: usize,
) -> PathIndex {
    let mut index = PathIndex::new();
    for path in paths {
        let (address, endpoints) = path_address(g, path, assignment, level);
        index.entry(address).or_default().push(endpoints);
    }
    for bucket in index.values_mut() {
        bucket.sort_unstable();
    }
    index
}

fn endpoint_kernel(
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

/// Path kernel restricted to one level, on prebuilt path indexes.
///
/// Palindromic addresses average the two endpoint pairings, mirroring the
/// edge convolution kernel.
pub fn nps_level(
    base: &BaseKernelSpec,
    gl: &Graph,
    il: &PathIndex,
    gr: &Graph,
    ir: &PathIndex,
    normalize: bool,
) -> Result<f64, KernelError> {
    let mut total = 0.0;
    for (address, bucket_l) in il {
        let Some(bucket_r) = ir.get(address) else {
            continue;
        };
        let palindromic = address.is_palindromic();
        let mut sum = 0.0;
        for &(s, t) in bucket_l {
            for &(sp, tp) in bucket_r {
                let aligned =
                    endpoint_kernel(base, gl, s, gr, sp)? * endpoint_kernel(base, gl, t, gr, tp)?;
                sum += if palindromic {
                    let crossed = endpoint_kernel(base, gl, s, gr, tp)?
                        * endpoint_kernel(base, gl, t, gr, sp)?;
                    0.5 * (aligned + crossed)
                } else {
                    aligned
                };
            }
        }
        if normalize {
            sum /= (bucket_l.len() * bucket_r.len()) as f64;
        }
        total += sum;
    }
    Ok(total)
}

/// Path kernel between two refined graphs over the levels of `config`.
pub fn nps_pair(
    gl: &Graph,
    al: &ColorAssignment,
    gr: &Graph,
    ar: &ColorAssignment,
    config: &KernelConfig,
) -> Result<f64, KernelError> {
    config.validate()?;
    let pl = extract_paths(gl, al, config.h, None);
    let pr = extract_paths(gr, ar, config.h, None);
    let mut total = 0.0;
    for level in config.levels() {
        let il = path_index(gl, &pl, al, level);
        let ir = path_index(gr, &pr, ar, level);
        total += nps_level(&config.base, gl, &il, gr, &ir, config.nps_normalize)?;
    }
    Ok(total)
}
