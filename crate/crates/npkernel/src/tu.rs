//! Reader and writer for the flat-text graph dataset layout used by the
//! public benchmark collections (`<name>_A.txt`, `<name>_graph_indicator.txt`
//! and friends).
//!
//! All ids in the files are 1-based and global across the dataset. The edge
//! file lists directed rows; pairs of opposite rows are merged into one
//! undirected edge. Odd occurrence counts are accepted, conflicting labels on
//! the two directions of the same edge are not.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use thiserror::Error;

use crate::graph::{Dataset, DatasetBuilder, GraphError};

#[derive(Debug, Error)]
pub enum TuError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("missing required file {path}")]
    MissingFile { path: String },
    #[error("{file}:{line}: {message}")]
    Malformed {
        file: String,
        line: usize,
        message: String,
    },
    #[error("{file}:{line}: self loop on node {node}")]
    SelfLoop {
        file: String,
        line: usize,
        node: usize,
    },
    #[error("{file}:{line}: edge ({u}, {v}) crosses graph boundaries")]
    CrossGraphEdge {
        file: String,
        line: usize,
        u: usize,
        v: usize,
    },
    #[error("conflicting labels for the two directions of edge ({u}, {v})")]
    EdgeLabelConflict { u: usize, v: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn read_lines(path: &Path) -> Result<Vec<String>, TuError> {
    let text = fs::read_to_string(path).map_err(|source| TuError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_owned)
        .collect())
}

fn file_name(dir: &Path, name: &str, suffix: &str) -> std::path::PathBuf {
    dir.join(format!("{name}_{suffix}.txt"))
}

fn parse_int(file: &str, line: usize, token: &str) -> Result<i64, TuError> {
    token.trim().parse().map_err(|_| TuError::Malformed {
        file: file.to_owned(),
        line,
        message: format!("expected an integer, got {token:?}"),
    })
}

/// Parses `<dir>/<name>_*.txt` into a [`Dataset`].
///
/// `_A.txt` and `_graph_indicator.txt` are required. Node labels, node
/// attributes, edge labels and graph labels are picked up when the matching
/// file exists. When node labels are absent every node is labeled with its
/// degree.
pub fn parse_tu_dataset(dir: &Path, name: &str) -> Result<Dataset, TuError> {
    let indicator_path = file_name(dir, name, "graph_indicator");
    let adjacency_path = file_name(dir, name, "A");
    for path in [&indicator_path, &adjacency_path] {
        if !path.exists() {
            return Err(TuError::MissingFile {
                path: path.display().to_string(),
            });
        }
    }

    let indicator_file = indicator_path.display().to_string();
    let mut graph_of_node = Vec::new();
    let mut graph_count = 0usize;
    for (i, row) in read_lines(&indicator_path)?.iter().enumerate() {
        let gid = parse_int(&indicator_file, i + 1, row)?;
        if gid < 1 {
            return Err(TuError::Malformed {
                file: indicator_file,
                line: i + 1,
                message: format!("graph indicator {gid} is not positive"),
            });
        }
        let gid = gid as usize - 1;
        graph_count = graph_count.max(gid + 1);
        graph_of_node.push(gid);
    }
    let node_count = graph_of_node.len();

    // Global node id -> (graph, local index), locals in file order.
    let mut local_of_node = vec![0usize; node_count];
    let mut nodes_per_graph = vec![0usize; graph_count];
    for (node, &gid) in graph_of_node.iter().enumerate() {
        local_of_node[node] = nodes_per_graph[gid];
        nodes_per_graph[gid] += 1;
    }

    let adjacency_file = adjacency_path.display().to_string();
    let edge_rows = read_lines(&adjacency_path)?;

    let edge_label_path = file_name(dir, name, "edge_labels");
    let edge_label_rows = if edge_label_path.exists() {
        let rows = read_lines(&edge_label_path)?;
        if rows.len() != edge_rows.len() {
            return Err(TuError::Malformed {
                file: edge_label_path.display().to_string(),
                line: rows.len(),
                message: format!(
                    "{} edge labels for {} edge rows",
                    rows.len(),
                    edge_rows.len()
                ),
            });
        }
        Some(rows)
    } else {
        None
    };

    // Per graph: undirected edge -> label text, merged over directed rows.
    let mut merged: Vec<BTreeMap<(usize, usize), Option<String>>> =
        vec![BTreeMap::new(); graph_count];
    for (i, row) in edge_rows.iter().enumerate() {
        let line = i + 1;
        let mut parts = row.split(',');
        let (u, v) = match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), None) => (
                parse_int(&adjacency_file, line, a)?,
                parse_int(&adjacency_file, line, b)?,
            ),
            _ => {
                return Err(TuError::Malformed {
                    file: adjacency_file,
                    line,
                    message: format!("expected \"u, v\", got {row:?}"),
                })
            }
        };
        for id in [u, v] {
            if id < 1 || id as usize > node_count {
                return Err(TuError::Malformed {
                    file: adjacency_file,
                    line,
                    message: format!("node id {id} out of range 1..={node_count}"),
                });
            }
        }
        let (u, v) = (u as usize - 1, v as usize - 1);
        if u == v {
            return Err(TuError::SelfLoop {
                file: adjacency_file,
                line,
                node: u + 1,
            });
        }
        if graph_of_node[u] != graph_of_node[v] {
            return Err(TuError::CrossGraphEdge {
                file: adjacency_file,
                line,
                u: u + 1,
                v: v + 1,
            });
        }
        let label = edge_label_rows.as_ref().map(|rows| rows[i].clone());
        let gid = graph_of_node[u];
        let key = (local_of_node[u.min(v)], local_of_node[u.max(v)]);
        match merged[gid].get(&key) {
            None => {
                merged[gid].insert(key, label);
            }
            Some(existing) => {
                if *existing != label {
                    return Err(TuError::EdgeLabelConflict { u: u + 1, v: v + 1 });
                }
            }
        }
    }

    let node_label_path = file_name(dir, name, "node_labels");
    let node_label_rows = if node_label_path.exists() {
        Some(read_lines(&node_label_path)?)
    } else {
        None
    };
    if let Some(rows) = &node_label_rows {
        if rows.len() != node_count {
            return Err(TuError::Malformed {
                file: node_label_path.display().to_string(),
                line: rows.len(),
                message: format!("{} node labels for {node_count} nodes", rows.len()),
            });
        }
    }

    let attr_path = file_name(dir, name, "node_attributes");
    let attr_rows = if attr_path.exists() {
        let attr_file = attr_path.display().to_string();
        let rows = read_lines(&attr_path)?;
        if rows.len() != node_count {
            return Err(TuError::Malformed {
                file: attr_file,
                line: rows.len(),
                message: format!("{} attribute rows for {node_count} nodes", rows.len()),
            });
        }
        let mut parsed = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let mut vector = Vec::new();
            for token in row.split(',') {
                let value: f64 = token.trim().parse().map_err(|_| TuError::Malformed {
                    file: attr_file.clone(),
                    line: i + 1,
                    message: format!("expected a float, got {token:?}"),
                })?;
                vector.push(value);
            }
            parsed.push(vector);
        }
        Some(parsed)
    } else {
        None
    };

    let class_path = file_name(dir, name, "graph_labels");
    let class_rows = if class_path.exists() {
        let class_file = class_path.display().to_string();
        let rows = read_lines(&class_path)?;
        let mut classes = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            classes.push(parse_int(&class_file, i + 1, row)?);
        }
        Some(classes)
    } else {
        None
    };

    // Group global node ids per graph, in file order.
    let mut nodes_of_graph: Vec<Vec<usize>> = vec![Vec::new(); graph_count];
    for (node, &gid) in graph_of_node.iter().enumerate() {
        nodes_of_graph[gid].push(node);
    }

    let mut builder = DatasetBuilder::new(name);
    for gid in 0..graph_count {
        let edges: Vec<(usize, usize)> = merged[gid].keys().copied().collect();
        let edge_labels: Option<Vec<&str>> = edge_label_rows.is_some().then(|| {
            merged[gid]
                .values()
                .map(|l| l.as_deref().unwrap_or(""))
                .collect()
        });

        let degree_labels: Vec<String>;
        let labels: Vec<&str> = match &node_label_rows {
            Some(rows) => nodes_of_graph[gid]
                .iter()
                .map(|&n| rows[n].as_str())
                .collect(),
            None => {
                let mut degrees = vec![0usize; nodes_of_graph[gid].len()];
                for &(u, v) in &edges {
                    degrees[u] += 1;
                    degrees[v] += 1;
                }
                degree_labels = degrees.iter().map(usize::to_string).collect();
                degree_labels.iter().map(String::as_str).collect()
            }
        };

        let attrs = attr_rows
            .as_ref()
            .map(|rows| nodes_of_graph[gid].iter().map(|&n| rows[n].clone()).collect());

        builder.add_graph(&labels, &edges, edge_labels.as_deref(), attrs)?;
    }
    if let Some(classes) = class_rows {
        builder.set_class_labels(classes);
    }
    Ok(builder.build()?)
}

/// Writes `dataset` to `<dir>/<name>_*.txt` in the layout read by
/// [`parse_tu_dataset`]. Each undirected edge is emitted as two directed rows.
pub fn write_tu_dataset(dataset: &Dataset, dir: &Path) -> Result<(), TuError> {
    fs::create_dir_all(dir).map_err(|source| TuError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let name = dataset.name();

    let write = |suffix: &str, body: String| -> Result<(), TuError> {
        let path = file_name(dir, name, suffix);
        let mut file = fs::File::create(&path).map_err(|source| TuError::Io {
            path: path.display().to_string(),
            source,
        })?;
        file.write_all(body.as_bytes()).map_err(|source| TuError::Io {
            path: path.display().to_string(),
            source,
        })
    };

    let mut offsets = Vec::with_capacity(dataset.len());
    let mut total_nodes = 0usize;
    for g in dataset.graphs() {
        offsets.push(total_nodes);
        total_nodes += g.node_count();
    }

    let mut adjacency = String::new();
    let mut edge_labels = String::new();
    let mut indicator = String::new();
    let mut node_labels = String::new();
    let mut attributes = String::new();
    for (gid, g) in dataset.graphs().iter().enumerate() {
        let base = offsets[gid] + 1;
        for (i, &(u, v)) in g.edges().iter().enumerate() {
            adjacency.push_str(&format!("{}, {}\n{}, {}\n", base + u, base + v, base + v, base + u));
            if dataset.has_edge_labels() {
                let text = dataset.edge_symbols().resolve(g.edge_label(i));
                edge_labels.push_str(&format!("{text}\n{text}\n"));
            }
        }
        for node in 0..g.node_count() {
            indicator.push_str(&format!("{}\n", gid + 1));
            node_labels.push_str(dataset.node_symbols().resolve(g.node_label(node)));
            node_labels.push('\n');
            if let Some(values) = g.attributes(node) {
                let row: Vec<String> = values.iter().map(|v| format!("{v}")).collect();
                attributes.push_str(&row.join(", "));
                attributes.push('\n');
            }
        }
    }

    write("A", adjacency)?;
    write("graph_indicator", indicator)?;
    write("node_labels", node_labels)?;
    if dataset.has_edge_labels() {
        write("edge_labels", edge_labels)?;
    }
    if dataset.attribute_dim().is_some() {
        write("node_attributes", attributes)?;
    }
    if let Some(classes) = dataset.class_labels() {
        let body: String = classes.iter().map(|c| format!("{c}\n")).collect();
        write("graph_labels", body)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write_fixture(dir: &Path, name: &str, files: &[(&str, &str)]) {
        for (suffix, body) in files {
            fs::write(dir.join(format!("{name}_{suffix}.txt")), body).unwrap();
        }
    }

    /// Two disjoint triangles, each edge listed in both directions.
    fn two_triangles(dir: &Path) {
        write_fixture(
            dir,
            "tri",
            &[
                (
                    "A",
                    "1, 2\n2, 1\n2, 3\n3, 2\n1, 3\n3, 1\n4, 5\n5, 4\n5, 6\n6, 5\n4, 6\n6, 4\n",
                ),
                ("graph_indicator", "1\n1\n1\n2\n2\n2\n"),
                ("node_labels", "0\n0\n1\n0\n0\n1\n"),
                ("graph_labels", "1\n-1\n"),
            ],
        );
    }

    #[test]
    fn parses_two_triangles() {
        let dir = tempfile::tempdir().unwrap();
        two_triangles(dir.path());
        let ds = parse_tu_dataset(dir.path(), "tri").unwrap();
        assert_eq!(ds.len(), 2);
        for g in ds.graphs() {
            assert_eq!(g.node_count(), 3);
            assert_eq!(g.edge_count(), 3);
        }
        assert_eq!(ds.class_labels(), Some(&[1, -1][..]));
        assert_eq!(ds.attribute_dim(), None);
    }

    #[test]
    fn rejects_self_loop_row() {
        let dir = tempfile::tempdir().unwrap();
        write_fixture(
            dir.path(),
            "loopy",
            &[("A", "1, 2\n5, 5\n"), ("graph_indicator", "1\n1\n1\n1\n1\n")],
        );
        let err = parse_tu_dataset(dir.path(), "loopy").unwrap_err();
        assert!(matches!(err, TuError::SelfLoop { node: 5, .. }));
    }

    #[test]
    fn rejects_out_of_range_node_id() {
        let dir = tempfile::tempdir().unwrap();
        write_fixture(
            dir.path(),
            "oops",
            &[("A", "1, 9\n"), ("graph_indicator", "1\n1\n")],
        );
        let err = parse_tu_dataset(dir.path(), "oops").unwrap_err();
        assert!(matches!(err, TuError::Malformed { .. }));
    }

    #[test]
    fn rejects_cross_graph_edge() {
        let dir = tempfile::tempdir().unwrap();
        write_fixture(
            dir.path(),
            "cross",
            &[("A", "1, 2\n"), ("graph_indicator", "1\n2\n")],
        );
        let err = parse_tu_dataset(dir.path(), "cross").unwrap_err();
        assert!(matches!(err, TuError::CrossGraphEdge { u: 1, v: 2, .. }));
    }

    #[test]
    fn rejects_edge_label_conflict() {
        let dir = tempfile::tempdir().unwrap();
        write_fixture(
            dir.path(),
            "conflict",
            &[
                ("A", "1, 2\n2, 1\n"),
                ("graph_indicator", "1\n1\n"),
                ("edge_labels", "0\n1\n"),
            ],
        );
        let err = parse_tu_dataset(dir.path(), "conflict").unwrap_err();
        assert!(matches!(err, TuError::EdgeLabelConflict { u: 2, v: 1 }));
    }

    #[test]
    fn missing_indicator_file_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        write_fixture(dir.path(), "bare", &[("A", "1, 2\n")]);
        let err = parse_tu_dataset(dir.path(), "bare").unwrap_err();
        assert!(matches!(err, TuError::MissingFile { .. }));
    }

    #[test]
    fn odd_direction_counts_are_accepted() {
        let dir = tempfile::tempdir().unwrap();
        write_fixture(
            dir.path(),
            "odd",
            &[("A", "1, 2\n2, 3\n3, 2\n"), ("graph_indicator", "1\n1\n1\n")],
        );
        let ds = parse_tu_dataset(dir.path(), "odd").unwrap();
        assert_eq!(ds.graph(0).edge_count(), 2);
    }

    #[test]
    fn absent_node_labels_fall_back_to_degrees() {
        let dir = tempfile::tempdir().unwrap();
        write_fixture(
            dir.path(),
            "plain",
            &[("A", "1, 2\n2, 3\n"), ("graph_indicator", "1\n1\n1\n")],
        );
        let ds = parse_tu_dataset(dir.path(), "plain").unwrap();
        let g = ds.graph(0);
        let texts: Vec<&str> = (0..3)
            .map(|v| ds.node_symbols().resolve(g.node_label(v)))
            .collect();
        assert_eq!(texts, ["1", "2", "1"]);
    }

    #[test]
    fn ragged_attribute_rows_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        write_fixture(
            dir.path(),
            "ragged",
            &[
                ("A", "1, 2\n"),
                ("graph_indicator", "1\n1\n"),
                ("node_attributes", "0.5, 1.5\n2.5\n"),
            ],
        );
        let err = parse_tu_dataset(dir.path(), "ragged").unwrap_err();
        assert!(matches!(err, TuError::Graph(GraphError::AttributeDim { .. })));
    }
}
