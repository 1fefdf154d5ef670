//! Attributed labeled graphs and dataset containers.
//!
//! A [`Graph`] is an undirected simple graph with a categorical label per
//! node, an optional real-valued attribute vector per node, and an optional
//! categorical label per edge. Raw label strings are interned through a
//! [`SymbolTable`] that is shared across all graphs of a [`Dataset`], so
//! label equality anywhere in the crate is plain integer equality.

use std::collections::HashMap;

use thiserror::Error;

/// Interned label identifier. Node labels and edge labels live in separate
/// symbol tables, so their ids must never be compared with each other.
pub type SymbolId = u32;

/// Symbol id every edge carries when a dataset has no edge labels.
pub const DEFAULT_EDGE_SYMBOL: SymbolId = 0;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph {graph}: self loop on node {node}")]
    SelfLoop { graph: usize, node: usize },
    #[error("graph {graph}: duplicate edge ({u}, {v})")]
    DuplicateEdge { graph: usize, u: usize, v: usize },
    #[error("graph {graph}: node index {index} out of range (node count {node_count})")]
    NodeOutOfRange {
        graph: usize,
        index: usize,
        node_count: usize,
    },
    #[error("graph {graph}: {got} node labels for {expected} nodes")]
    LabelCount {
        graph: usize,
        expected: usize,
        got: usize,
    },
    #[error("graph {graph}: {got} edge labels for {expected} edges")]
    EdgeLabelCount {
        graph: usize,
        expected: usize,
        got: usize,
    },
    #[error("graph {graph}: node {node} has attribute dimension {got}, expected {expected}")]
    AttributeDim {
        graph: usize,
        node: usize,
        expected: usize,
        got: usize,
    },
    #[error("graph {graph}: node {node} has an empty attribute vector")]
    EmptyAttribute { graph: usize, node: usize },
    #[error("graph {graph}: attribute presence differs from the rest of the dataset")]
    MixedAttributes { graph: usize },
    #[error("graph {graph}: edge label presence differs from the rest of the dataset")]
    MixedEdgeLabels { graph: usize },
    #[error("{got} class labels for {expected} graphs")]
    ClassLabelCount { expected: usize, got: usize },
}

/// Insertion-ordered bidirectional map between raw label text and compact ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymbolTable {
    ids: HashMap<String, SymbolId>,
    texts: Vec<String>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id of `text`, interning it if it was never seen before.
    pub fn intern(&mut self, text: &str) -> SymbolId {
        if let Some(&id) = self.ids.get(text) {
            return id;
        }
        let id = self.texts.len() as SymbolId;
        self.ids.insert(text.to_owned(), id);
        self.texts.push(text.to_owned());
        id
    }

    pub fn get(&self, text: &str) -> Option<SymbolId> {
        self.ids.get(text).copied()
    }

    pub fn resolve(&self, id: SymbolId) -> &str {
        &self.texts[id as usize]
    }

    pub fn len(&self) -> usize {
        self.texts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.texts.is_empty()
    }
}

/// Undirected simple graph with interned node labels, optional node
/// attributes and optional edge labels.
///
/// Edges are stored once, endpoint-sorted (`u < v`) and in ascending order.
/// The adjacency lists are derived at construction time; a `Graph` is
/// immutable afterwards, which is what makes the parallel kernel code safe.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    graph_id: usize,
    node_count: usize,
    edges: Vec<(usize, usize)>,
    node_labels: Vec<SymbolId>,
    node_attributes: Option<Vec<Vec<f64>>>,
    edge_labels: Option<Vec<SymbolId>>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph and checks every structural invariant.
    ///
    /// Input edges may come in any orientation and order; they are
    /// canonicalized to `u < v` and sorted, with `edge_labels` kept aligned.
    pub fn new(
        graph_id: usize,
        node_count: usize,
        edges: Vec<(usize, usize)>,
        node_labels: Vec<SymbolId>,
        node_attributes: Option<Vec<Vec<f64>>>,
        edge_labels: Option<Vec<SymbolId>>,
    ) -> Result<Self, GraphError> {
        if node_labels.len() != node_count {
            return Err(GraphError::LabelCount {
                graph: graph_id,
                expected: node_count,
                got: node_labels.len(),
            });
        }
        if let Some(labels) = &edge_labels {
            if labels.len() != edges.len() {
                return Err(GraphError::EdgeLabelCount {
                    graph: graph_id,
                    expected: edges.len(),
                    got: labels.len(),
                });
            }
        }

        let mut rows: Vec<((usize, usize), SymbolId)> = edges
            .iter()
            .enumerate()
            .map(|(i, &(u, v))| {
                let key = (u.min(v), u.max(v));
                let label = edge_labels
                    .as_ref()
                    .map_or(DEFAULT_EDGE_SYMBOL, |ls| ls[i]);
                (key, label)
            })
            .collect();
        rows.sort_unstable();

        let sorted_edges: Vec<(usize, usize)> = rows.iter().map(|r| r.0).collect();
        let sorted_labels = edge_labels
            .is_some()
            .then(|| rows.iter().map(|r| r.1).collect());

        let mut g = Graph {
            graph_id,
            node_count,
            edges: sorted_edges,
            node_labels,
            node_attributes,
            edge_labels: sorted_labels,
            adjacency: Vec::new(),
        };
        g.validate()?;

        let mut adjacency = vec![Vec::new(); node_count];
        for &(u, v) in &g.edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        g.adjacency = adjacency;
        Ok(g)
    }

    /// Re-checks every structural invariant of the graph.
    pub fn validate(&self) -> Result<(), GraphError> {
        let id = self.graph_id;
        if self.node_labels.len() != self.node_count {
            return Err(GraphError::LabelCount {
                graph: id,
                expected: self.node_count,
                got: self.node_labels.len(),
            });
        }
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            if u == v {
                return Err(GraphError::SelfLoop { graph: id, node: u });
            }
            for node in [u, v] {
                if node >= self.node_count {
                    return Err(GraphError::NodeOutOfRange {
                        graph: id,
                        index: node,
                        node_count: self.node_count,
                    });
                }
            }
            if i > 0 && self.edges[i - 1] == (u, v) {
                return Err(GraphError::DuplicateEdge { graph: id, u, v });
            }
        }
        if let Some(labels) = &self.edge_labels {
            if labels.len() != self.edges.len() {
                return Err(GraphError::EdgeLabelCount {
                    graph: id,
                    expected: self.edges.len(),
                    got: labels.len(),
                });
            }
        }
        if let Some(attrs) = &self.node_attributes {
            if attrs.len() != self.node_count {
                return Err(GraphError::LabelCount {
                    graph: id,
                    expected: self.node_count,
                    got: attrs.len(),
                });
            }
            let dim = attrs.first().map_or(0, Vec::len);
            for (node, vector) in attrs.iter().enumerate() {
                if vector.is_empty() {
                    return Err(GraphError::EmptyAttribute { graph: id, node });
                }
                if vector.len() != dim {
                    return Err(GraphError::AttributeDim {
                        graph: id,
                        node,
                        expected: dim,
                        got: vector.len(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn graph_id(&self) -> usize {
        self.graph_id
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Endpoint-sorted, ascending edge list.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn node_label(&self, node: usize) -> SymbolId {
        self.node_labels[node]
    }

    pub fn node_labels(&self) -> &[SymbolId] {
        &self.node_labels
    }

    /// Label of the edge at position `index` in [`Graph::edges`].
    pub fn edge_label(&self, index: usize) -> SymbolId {
        self.edge_labels
            .as_ref()
            .map_or(DEFAULT_EDGE_SYMBOL, |ls| ls[index])
    }

    pub fn has_edge_labels(&self) -> bool {
        self.edge_labels.is_some()
    }

    pub fn attributes(&self, node: usize) -> Option<&[f64]> {
        self.node_attributes.as_ref().map(|a| a[node].as_slice())
    }

    pub fn has_attributes(&self) -> bool {
        self.node_attributes.is_some()
    }

    pub fn attribute_dim(&self) -> Option<usize> {
        self.node_attributes
            .as_ref()
            .map(|a| a.first().map_or(0, Vec::len))
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }
}

/// A named collection of graphs sharing one node-label and one edge-label
/// alphabet, with optional per-graph class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    graphs: Vec<Graph>,
    class_labels: Option<Vec<i64>>,
    attribute_dim: Option<usize>,
    node_symbols: SymbolTable,
    edge_symbols: SymbolTable,
}

impl Dataset {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// The same dataset under another name; file prefixes follow the name.
    pub fn with_name(mut self, name: &str) -> Dataset {
        self.name = name.to_string();
        self
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn graphs(&self) -> &[Graph] {
        &self.graphs
    }

    pub fn graph(&self, index: usize) -> &Graph {
        &self.graphs[index]
    }

    pub fn class_labels(&self) -> Option<&[i64]> {
        self.class_labels.as_deref()
    }

    /// Shared attribute dimension, `None` when the dataset is unattributed.
    pub fn attribute_dim(&self) -> Option<usize> {
        self.attribute_dim
    }

    pub fn node_symbols(&self) -> &SymbolTable {
        &self.node_symbols
    }

    pub fn edge_symbols(&self) -> &SymbolTable {
        &self.edge_symbols
    }

    pub fn has_edge_labels(&self) -> bool {
        self.graphs.first().is_some_and(Graph::has_edge_labels)
    }
}

/// Incremental [`Dataset`] constructor used by the parser, the generators and
/// the test fixtures. Label texts are interned in first-occurrence order.
#[derive(Debug)]
pub struct DatasetBuilder {
    name: String,
    graphs: Vec<Graph>,
    class_labels: Option<Vec<i64>>,
    attribute_dim: Option<Option<usize>>,
    edge_labeled: Option<bool>,
    node_symbols: SymbolTable,
    edge_symbols: SymbolTable,
}

impl DatasetBuilder {
    pub fn new(name: &str) -> Self {
        let mut edge_symbols = SymbolTable::new();
        // Reserve id 0 for the implicit label of unlabeled edges.
        edge_symbols.intern("");
        DatasetBuilder {
            name: name.to_owned(),
            graphs: Vec::new(),
            class_labels: None,
            attribute_dim: None,
            edge_labeled: None,
            node_symbols: SymbolTable::new(),
            edge_symbols,
        }
    }

    /// Adds a graph built from raw label texts. `node_labels.len()` fixes the
    /// node count. Returns the index of the new graph.
    pub fn add_graph(
        &mut self,
        node_labels: &[&str],
        edges: &[(usize, usize)],
        edge_labels: Option<&[&str]>,
        node_attributes: Option<Vec<Vec<f64>>>,
    ) -> Result<usize, GraphError> {
        let graph_id = self.graphs.len();

        let attr_dim = node_attributes
            .as_ref()
            .map(|attrs| attrs.first().map_or(0, Vec::len));
        match self.attribute_dim {
            None => self.attribute_dim = Some(attr_dim),
            Some(expected) => {
                if expected != attr_dim {
                    return Err(GraphError::MixedAttributes { graph: graph_id });
                }
            }
        }
        match self.edge_labeled {
            None => self.edge_labeled = Some(edge_labels.is_some()),
            Some(expected) => {
                if expected != edge_labels.is_some() {
                    return Err(GraphError::MixedEdgeLabels { graph: graph_id });
                }
            }
        }

        let label_ids: Vec<SymbolId> = node_labels
            .iter()
            .map(|text| self.node_symbols.intern(text))
            .collect();
        let edge_label_ids: Option<Vec<SymbolId>> = edge_labels.map(|texts| {
            texts
                .iter()
                .map(|text| self.edge_symbols.intern(text))
                .collect()
        });

        let graph = Graph::new(
            graph_id,
            node_labels.len(),
            edges.to_vec(),
            label_ids,
            node_attributes,
            edge_label_ids,
        )?;
        self.graphs.push(graph);
        Ok(graph_id)
    }

    pub fn set_class_labels(&mut self, labels: Vec<i64>) {
        self.class_labels = Some(labels);
    }

    pub fn build(self) -> Result<Dataset, GraphError> {
        if let Some(labels) = &self.class_labels {
            if labels.len() != self.graphs.len() {
                return Err(GraphError::ClassLabelCount {
                    expected: self.graphs.len(),
                    got: labels.len(),
                });
            }
        }
        Ok(Dataset {
            name: self.name,
            attribute_dim: self.attribute_dim.flatten(),
            graphs: self.graphs,
            class_labels: self.class_labels,
            node_symbols: self.node_symbols,
            edge_symbols: self.edge_symbols,
        })
    }
}
