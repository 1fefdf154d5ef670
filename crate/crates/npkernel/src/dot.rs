//! Graphviz DOT rendering for colorings, products and edge partitions.

use crate::graph::Dataset;
use crate::product::ProductGraph;
use crate::wl::ColorAssignment;

fn escape(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"")
}

/// One factor graph with nodes annotated by their color at `level`.
pub fn coloring_dot(
    ds: &Dataset,
    index: usize,
    assignment: &ColorAssignment,
    level: usize,
) -> String {
    let g = ds.graph(index);
    let mut out = format!(
        "graph g{} {{\n  label=\"{} graph {} level {}\";\n  node [shape=circle];\n",
        g.graph_id(),
        escape(ds.name()),
        g.graph_id(),
        level
    );
    for v in 0..g.node_count() {
        let label = ds.node_symbols().resolve(g.node_label(v));
        out.push_str(&format!(
            "  n{v} [label=\"{}\", xlabel=\"c{}\"];\n",
            escape(label),
            assignment.color(level, v)
        ));
    }
    for (i, &(u, v)) in g.edges().iter().enumerate() {
        let label = ds.edge_symbols().resolve(g.edge_label(i));
        if label.is_empty() {
            out.push_str(&format!("  n{u} -- n{v};\n"));
        } else {
            out.push_str(&format!("  n{u} -- n{v} [label=\"{}\"];\n", escape(label)));
        }
    }
    out.push_str("}\n");
    out
}

/// One factor graph with the edges in `np_edges` drawn bold and all other
/// edges dashed. `np_edges` holds canonical `(min, max)` endpoint pairs.
pub fn np_partition_dot(ds: &Dataset, index: usize, np_edges: &[(usize, usize)]) -> String {
    let g = ds.graph(index);
    let mut marked = np_edges.to_vec();
    marked.sort_unstable();
    let mut out = format!(
        "graph g{} {{\n  label=\"{} graph {} edge partition\";\n  node [shape=circle];\n",
        g.graph_id(),
        escape(ds.name()),
        g.graph_id()
    );
    for v in 0..g.node_count() {
        let label = ds.node_symbols().resolve(g.node_label(v));
        out.push_str(&format!("  n{v} [label=\"{}\"];\n", escape(label)));
    }
    for &(u, v) in g.edges() {
        let style = if marked.binary_search(&(u, v)).is_ok() {
            "style=bold, penwidth=2"
        } else {
            "style=dashed"
        };
        out.push_str(&format!("  n{u} -- n{v} [{style}];\n"));
    }
    out.push_str("}\n");
    out
}

/// A product graph with nodes labeled by their factor pair and color.
pub fn product_dot(product: &ProductGraph) -> String {
    let mut out = format!(
        "graph product {{\n  label=\"product at level {}\";\n  node [shape=box];\n",
        product.level
    );
    for (k, &(u, v)) in product.nodes.iter().enumerate() {
        out.push_str(&format!(
            "  p{k} [label=\"({u}, {v}) c{}\"];\n",
            product.node_colors[k]
        ));
    }
    for &(i, j) in &product.edges {
        out.push_str(&format!("  p{i} -- p{j};\n"));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::DatasetBuilder;
    use crate::product::{build_product, np_edges, Side};
    use crate::wl::{refine, ColorDictionary};

    fn two_triangles() -> Dataset {
        let mut b = DatasetBuilder::new("dots");
        b.add_graph(&["a", "a", "b"], &[(0, 1), (1, 2), (0, 2)], None, None)
            .unwrap();
        b.add_graph(&["a", "a", "b"], &[(0, 1), (1, 2), (0, 2)], None, None)
            .unwrap();
        b.build().unwrap()
    }

    #[test]
    fn coloring_dot_lists_every_node_and_edge() {
        let ds = two_triangles();
        let mut dict = ColorDictionary::new();
        let assignments = refine(&ds, 1, &mut dict);
        let dot = coloring_dot(&ds, 0, &assignments[0], 1);
        assert!(dot.starts_with("graph g0 {"));
        for needle in ["n0 [", "n1 [", "n2 [", "n0 -- n1", "n1 -- n2", "n0 -- n2"] {
            assert!(dot.contains(needle), "missing {needle} in {dot}");
        }
        assert!(dot.contains("xlabel=\"c"));
    }

    #[test]
    fn partition_dot_marks_surviving_edges_bold() {
        let ds = two_triangles();
        let mut dict = ColorDictionary::new();
        let assignments = refine(&ds, 1, &mut dict);
        let product = build_product(ds.graph(0), &assignments[0], ds.graph(1), &assignments[1], 1);
        let surviving = np_edges(&product, Side::Left);
        let dot = np_partition_dot(&ds, 0, &surviving);
        assert!(dot.contains("style=bold, penwidth=2"));
        let partial = np_partition_dot(&ds, 0, &surviving[..1]);
        assert!(partial.contains("style=dashed"));
    }

    #[test]
    fn product_dot_renders_factor_pairs() {
        let ds = two_triangles();
        let mut dict = ColorDictionary::new();
        let assignments = refine(&ds, 1, &mut dict);
        let product = build_product(ds.graph(0), &assignments[0], ds.graph(1), &assignments[1], 1);
        let dot = product_dot(&product);
        assert!(dot.starts_with("graph product {"));
        assert!(dot.contains("(0, 0)"));
        assert!(dot.contains(" -- "));
    }

    #[test]
    fn quotes_in_labels_are_escaped() {
        let mut b = DatasetBuilder::new("quo\"ted");
        b.add_graph(&["x\"y", "x\"y"], &[(0, 1)], None, None).unwrap();
        let ds = b.build().unwrap();
        let mut dict = ColorDictionary::new();
        let assignments = refine(&ds, 1, &mut dict);
        let dot = coloring_dot(&ds, 0, &assignments[0], 0);
        assert!(dot.contains("x\\\"y"));
    }
}
