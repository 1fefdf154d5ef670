//! Brute-force reference implementations used to cross-check the kernels.
//!
//! Nothing here shares code with the production path: colors are kept as
//! uncompressed recursive structures instead of interned ids, feature
//! matching runs as plain nested loops over edges and enumerated shortest
//! paths, and weights are recounted from scratch. The derived ordering of
//! [`NaiveColor`] coincides with the ordering of production color ids (label
//! text order at the base, then (own, sorted neighbors) order per level), so
//! orientation decisions agree between the two implementations.

// The whole module recomputes definitions with explicit index loops; the
// iterator forms clippy suggests would obscure that correspondence.
#![allow(clippy::needless_range_loop)]

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::graph::{Dataset, Graph};
use crate::kernels::{BaseKernelSpec, KernelConfig, KernelError, KernelKind};
use crate::paths::nps_pair;
use crate::wl::ColorAssignment;

/// An uncompressed refinement color: the raw label text at the base, then
/// one nesting per level of the node's previous color and the sorted
/// previous colors of its neighbors.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NaiveColor {
    Base(String),
    Refined(Box<NaiveColor>, Vec<NaiveColor>),
}

/// Refines every graph of `ds` for `h` rounds without any compression.
/// Returns colors indexed by level, graph, node.
pub fn naive_refine(ds: &Dataset, h: usize) -> Vec<Vec<Vec<NaiveColor>>> {
    let base: Vec<Vec<NaiveColor>> = ds
        .graphs()
        .iter()
        .map(|g| {
            (0..g.node_count())
                .map(|v| NaiveColor::Base(ds.node_symbols().resolve(g.node_label(v)).to_string()))
                .collect()
        })
        .collect();
    let mut levels = vec![base];
    for _ in 1..=h {
        let prev = levels.last().expect("at least the base level exists");
        let next: Vec<Vec<NaiveColor>> = ds
            .graphs()
            .iter()
            .enumerate()
            .map(|(gi, g)| {
                (0..g.node_count())
                    .map(|v| {
                        let mut around: Vec<NaiveColor> =
                            g.neighbors(v).iter().map(|&u| prev[gi][u].clone()).collect();
                        around.sort();
                        NaiveColor::Refined(Box::new(prev[gi][v].clone()), around)
                    })
                    .collect()
            })
            .collect();
        levels.push(next);
    }
    levels
}

fn naive_base_kernel(base: &BaseKernelSpec, x: &[f64], y: &[f64]) -> Result<f64, KernelError> {
    if !matches!(base, BaseKernelSpec::Unit) && x.len() != y.len() {
        return Err(KernelError::DimensionMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(match *base {
        BaseKernelSpec::Unit => 1.0,
        BaseKernelSpec::Linear => x.iter().zip(y).map(|(a, b)| a * b).sum(),
        BaseKernelSpec::Gaussian { beta } => {
            let mut sq = 0.0;
            for (a, b) in x.iter().zip(y) {
                sq += (a - b) * (a - b);
            }
            (-beta * sq).exp()
        }
    })
}

fn naive_node_kernel(
    base: &BaseKernelSpec,
    gl: &Graph,
    u: usize,
    gr: &Graph,
    v: usize,
) -> Result<f64, KernelError> {
    match (gl.attributes(u), gr.attributes(v)) {
        (Some(x), Some(y)) => naive_base_kernel(base, x, y),
        _ => match base {
            BaseKernelSpec::Unit => Ok(1.0),
            _ => Err(KernelError::AttributesMissing),
        },
    }
}

/// Unordered edge key: endpoint colors sorted, plus the edge label text.
type NaiveEdgeAddress = (NaiveColor, String, NaiveColor);

fn naive_edge_address(
    ds: &Dataset,
    g: &Graph,
    colors: &[NaiveColor],
    edge_index: usize,
) -> NaiveEdgeAddress {
    let (u, v) = g.edges()[edge_index];
    let label = ds
        .edge_symbols()
        .resolve(g.edge_label(edge_index))
        .to_string();
    let (a, b) = (&colors[u], &colors[v]);
    if a <= b {
        (a.clone(), label, b.clone())
    } else {
        (b.clone(), label, a.clone())
    }
}

fn naive_edge_counts(
    ds: &Dataset,
    g: &Graph,
    colors: &[NaiveColor],
) -> BTreeMap<NaiveEdgeAddress, u64> {
    let mut counts = BTreeMap::new();
    for i in 0..g.edge_count() {
        *counts
            .entry(naive_edge_address(ds, g, colors, i))
            .or_insert(0u64) += 1;
    }
    counts
}

/// Edge convolution kernel recomputed by nested loops over all edge pairs.
pub fn brute_npe(
    ds: &Dataset,
    left: usize,
    right: usize,
    levels: &[usize],
    base: &BaseKernelSpec,
) -> Result<f64, KernelError> {
    let deepest = levels.iter().copied().max().unwrap_or(0);
    let naive = naive_refine(ds, deepest);
    let (gl, gr) = (ds.graph(left), ds.graph(right));
    let mut total = 0.0;
    for &level in levels {
        let cl = &naive[level][left];
        let cr = &naive[level][right];
        let counts_l = naive_edge_counts(ds, gl, cl);
        let counts_r = naive_edge_counts(ds, gr, cr);
        for i in 0..gl.edge_count() {
            let ae = naive_edge_address(ds, gl, cl, i);
            for j in 0..gr.edge_count() {
                let af = naive_edge_address(ds, gr, cr, j);
                if ae != af {
                    continue;
                }
                let (u, v) = gl.edges()[i];
                let (s, t) = gr.edges()[j];
                let value = if ae.0 == ae.2 {
                    let aligned = naive_node_kernel(base, gl, u, gr, s)?
                        * naive_node_kernel(base, gl, v, gr, t)?;
                    let crossed = naive_node_kernel(base, gl, u, gr, t)?
                        * naive_node_kernel(base, gl, v, gr, s)?;
                    0.5 * (aligned + crossed)
                } else {
                    let (a, b) = if cl[u] < cl[v] { (u, v) } else { (v, u) };
                    let (c, d) = if cr[s] < cr[t] { (s, t) } else { (t, s) };
                    naive_node_kernel(base, gl, a, gr, c)?
                        * naive_node_kernel(base, gl, b, gr, d)?
                };
                total += value / ((counts_l[&ae] * counts_r[&af]) as f64);
            }
        }
    }
    Ok(total)
}

/// Overlap kernel recomputed from per-graph address counts.
pub fn brute_npo(ds: &Dataset, left: usize, right: usize, h: usize) -> u64 {
    let naive = naive_refine(ds, h);
    let (gl, gr) = (ds.graph(left), ds.graph(right));
    let mut total = 0u64;
    for level in 1..=h {
        let counts_l = naive_edge_counts(ds, gl, &naive[level][left]);
        let counts_r = naive_edge_counts(ds, gr, &naive[level][right]);
        for (address, nl) in &counts_l {
            if let Some(nr) = counts_r.get(address) {
                total += (*nl).min(*nr);
            }
        }
    }
    total
}

fn naive_interleaved_cmp(
    ca: &[NaiveColor],
    la: &[String],
    cb: &[NaiveColor],
    lb: &[String],
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

fn floyd_warshall(g: &Graph) -> Vec<Vec<u32>> {
    const FAR: u32 = u32::MAX / 4;
    let n = g.node_count();
    let mut dist = vec![vec![FAR; n]; n];
    for v in 0..n {
        dist[v][v] = 0;
    }
    for &(u, v) in g.edges() {
        dist[u][v] = 1;
        dist[v][u] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = dist[i][k] + dist[k][j];
                if via < dist[i][j] {
                    dist[i][j] = via;
                }
            }
        }
    }
    dist
}

/// All shortest paths from `s` to `t`, as node lists, found by walking
/// distance-decreasing edges.
fn all_shortest_paths(g: &Graph, dist: &[Vec<u32>], s: usize, t: usize) -> Vec<Vec<usize>> {
    let mut found = Vec::new();
    let mut stack = vec![s];
    collect_paths(g, dist, t, &mut stack, &mut found);
    found
}

fn collect_paths(
    g: &Graph,
    dist: &[Vec<u32>],
    t: usize,
    stack: &mut Vec<usize>,
    found: &mut Vec<Vec<usize>>,
) {
    let u = *stack.last().expect("the walk starts at the source");
    if u == t {
        found.push(stack.clone());
        return;
    }
    for &v in g.neighbors(u) {
        if dist[v][t] + 1 == dist[u][t] {
            stack.push(v);
            collect_paths(g, dist, t, stack, found);
            stack.pop();
        }
    }
}

fn path_sequence(
    ds: &Dataset,
    g: &Graph,
    colors: &[NaiveColor],
    nodes: &[usize],
) -> (Vec<NaiveColor>, Vec<String>) {
    let cs: Vec<NaiveColor> = nodes.iter().map(|&v| colors[v].clone()).collect();
    let ls: Vec<String> = nodes
        .windows(2)
        .map(|w| {
            let key = (w[0].min(w[1]), w[0].max(w[1]));
            let i = g
                .edges()
                .binary_search(&key)
                .expect("consecutive path nodes are adjacent");
            ds.edge_symbols().resolve(g.edge_label(i)).to_string()
        })
        .collect();
    (cs, ls)
}

type NaivePathAddress = (Vec<NaiveColor>, Vec<String>);

/// Canonical paths of one graph by exhaustive enumeration: every shortest
/// path of every connected pair is listed in both directions and the
/// lexicographically smallest interleaved sequence wins.
fn naive_canonical_paths(
    ds: &Dataset,
    g: &Graph,
    colors: &[NaiveColor],
) -> Vec<Vec<usize>> {
    let dist = floyd_warshall(g);
    let mut selected = Vec::new();
    for s in 0..g.node_count() {
        for t in (s + 1)..g.node_count() {
            if dist[s][t] == 0 || dist[s][t] >= u32::MAX / 4 {
                continue;
            }
            let mut best: Option<(Vec<NaiveColor>, Vec<String>, Vec<usize>)> = None;
            for path in all_shortest_paths(g, &dist, s, t) {
                let reversed: Vec<usize> = path.iter().rev().copied().collect();
                for candidate in [path, reversed] {
                    let (cs, ls) = path_sequence(ds, g, colors, &candidate);
                    let better = match &best {
                        None => true,
                        Some((bc, bl, _)) => {
                            naive_interleaved_cmp(&cs, &ls, bc, bl) == Ordering::Less
                        }
                    };
                    if better {
                        best = Some((cs, ls, candidate));
                    }
                }
            }
            let (_, _, nodes) = best.expect("connected pairs have at least one path");
            selected.push(nodes);
        }
    }
    selected
}

fn naive_path_index(
    ds: &Dataset,
    g: &Graph,
    colors: &[NaiveColor],
    paths: &[Vec<usize>],
) -> BTreeMap<NaivePathAddress, Vec<(usize, usize)>> {
    let mut index: BTreeMap<NaivePathAddress, Vec<(usize, usize)>> = BTreeMap::new();
    for nodes in paths {
        let (cs, ls) = path_sequence(ds, g, colors, nodes);
        let rn: Vec<usize> = nodes.iter().rev().copied().collect();
        let (rc, rl) = path_sequence(ds, g, colors, &rn);
        let (key, endpoints) = match naive_interleaved_cmp(&cs, &ls, &rc, &rl) {
            Ordering::Less | Ordering::Equal => ((cs, ls), (nodes[0], *nodes.last().unwrap())),
            Ordering::Greater => ((rc, rl), (rn[0], *rn.last().unwrap())),
        };
        index.entry(key).or_default().push(endpoints);
    }
    index
}

/// Path kernel recomputed by exhaustive shortest-path enumeration. Intended
/// for small graphs; the enumeration grows with the number of tied paths.
pub fn brute_nps(
    ds: &Dataset,
    left: usize,
    right: usize,
    levels: &[usize],
    base: &BaseKernelSpec,
    normalize: bool,
) -> Result<f64, KernelError> {
    let deepest = levels.iter().copied().max().unwrap_or(0);
    let naive = naive_refine(ds, deepest);
    let (gl, gr) = (ds.graph(left), ds.graph(right));
    let paths_l = naive_canonical_paths(ds, gl, &naive[deepest][left]);
    let paths_r = naive_canonical_paths(ds, gr, &naive[deepest][right]);
    let mut total = 0.0;
    for &level in levels {
        let il = naive_path_index(ds, gl, &naive[level][left], &paths_l);
        let ir = naive_path_index(ds, gr, &naive[level][right], &paths_r);
        for (address, bucket_l) in &il {
            let Some(bucket_r) = ir.get(address) else {
                continue;
            };
            let palindromic = {
                let rc: Vec<NaiveColor> = address.0.iter().rev().cloned().collect();
                let rl: Vec<String> = address.1.iter().rev().cloned().collect();
                address.0 == rc && address.1 == rl
            };
            let mut sum = 0.0;
            for &(s, t) in bucket_l {
                for &(sp, tp) in bucket_r {
                    let aligned = naive_node_kernel(base, gl, s, gr, sp)?
                        * naive_node_kernel(base, gl, t, gr, tp)?;
                    sum += if palindromic {
                        let crossed = naive_node_kernel(base, gl, s, gr, tp)?
                            * naive_node_kernel(base, gl, t, gr, sp)?;
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
    }
    Ok(total)
}

/// One production-versus-reference comparison.
#[derive(Debug, Clone)]
pub struct OracleRow {
    pub kernel: KernelKind,
    pub left: usize,
    pub right: usize,
    pub reference: f64,
    pub production: f64,
    pub rel_error: f64,
}

fn relative_error(reference: f64, production: f64) -> f64 {
    let scale = reference.abs().max(production.abs()).max(1.0);
    (reference - production).abs() / scale
}

/// Comparison table over a batch of graph pairs.
#[derive(Debug, Clone, Default)]
pub struct OracleReport {
    pub rows: Vec<OracleRow>,
}

impl OracleReport {
    pub fn max_rel_error(&self) -> f64 {
        self.rows.iter().map(|r| r.rel_error).fold(0.0, f64::max)
    }

    /// The overlap kernel is integer valued and must agree exactly.
    pub fn overlap_exact(&self) -> bool {
        self.rows
            .iter()
            .filter(|r| r.kernel == KernelKind::Npo)
            .all(|r| r.reference == r.production)
    }

    pub fn render(&self) -> String {
        let mut out = String::from(
            "kernel    left  right       reference      production       rel_error\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{:<8} {:>5} {:>6} {:>15.9e} {:>15.9e} {:>15.3e}\n",
                r.kernel.to_string(),
                r.left,
                r.right,
                r.reference,
                r.production,
                r.rel_error
            ));
        }
        out.push_str(&format!(
            "max relative error {:.3e}, overlap exact: {}\n",
            self.max_rel_error(),
            self.overlap_exact()
        ));
        out
    }
}

/// Runs production and reference implementations side by side on the given
/// pairs. `config` supplies depth, level range, base kernel and path
/// normalization; the kind field is ignored in favor of the per-batch lists.
pub fn oracle_report(
    ds: &Dataset,
    assignments: &[ColorAssignment],
    config: &KernelConfig,
    npe_pairs: &[(usize, usize)],
    npo_pairs: &[(usize, usize)],
    nps_pairs: &[(usize, usize)],
) -> Result<OracleReport, KernelError> {
    config.validate()?;
    let resolved = config.resolve_base(ds);
    let base = resolved.base;
    let levels = resolved.levels();
    let mut report = OracleReport::default();

    for &(left, right) in npe_pairs {
        let production = crate::kernels::npe_pair(
            ds.graph(left),
            &assignments[left],
            ds.graph(right),
            &assignments[right],
            &resolved,
        )?;
        let reference = brute_npe(ds, left, right, &levels, &base)?;
        report.rows.push(OracleRow {
            kernel: KernelKind::Npe,
            left,
            right,
            reference,
            production,
            rel_error: relative_error(reference, production),
        });
    }
    for &(left, right) in npo_pairs {
        let production = crate::kernels::npo_pair(
            ds.graph(left),
            &assignments[left],
            ds.graph(right),
            &assignments[right],
            resolved.h,
        ) as f64;
        let reference = brute_npo(ds, left, right, resolved.h) as f64;
        report.rows.push(OracleRow {
            kernel: KernelKind::Npo,
            left,
            right,
            reference,
            production,
            rel_error: relative_error(reference, production),
        });
    }
    for &(left, right) in nps_pairs {
        let production = nps_pair(
            ds.graph(left),
            &assignments[left],
            ds.graph(right),
            &assignments[right],
            &resolved,
        )?;
        let reference = brute_nps(ds, left, right, &levels, &base, resolved.nps_normalize)?;
        report.rows.push(OracleRow {
            kernel: KernelKind::Nps,
            left,
            right,
            reference,
            production,
            rel_error: relative_error(reference, production),
        });
    }
    Ok(report)
}
