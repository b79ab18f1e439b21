use std::fmt::Write;

use super::{LabeledGraph, NodeId};

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering: nodes are labeled `id|label`, half-edge labels are
/// drawn as tail and head labels.
pub fn to_dot(g: &LabeledGraph, name: &str) -> String {
    to_dot_styled(g, name, |_| None)
}

/// Like [`to_dot`], with an optional fill color per node.
pub fn to_dot_styled(g: &LabeledGraph, name: &str, color: impl Fn(NodeId) -> Option<String>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "graph \"{}\" {{", escape(name));
    for v in 0..g.graph.node_count() {
        let label = escape(&format!("{v}|{}", g.node_label(v)));
        match color(v) {
            Some(c) => {
                let _ = writeln!(out, "  {v} [label=\"{label}\", style=filled, fillcolor=\"{}\"];", escape(&c));
            }
            None => {
                let _ = writeln!(out, "  {v} [label=\"{label}\"];");
            }
        }
    }
    for (e, &(u, v)) in g.graph.edges().iter().enumerate() {
        let [lu, lv] = &g.labels.half_edges[e];
        let _ = writeln!(
            out,
            "  {u} -- {v} [taillabel=\"{}\", headlabel=\"{}\"];",
            escape(lu),
            escape(lv)
        );
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Graph, Labeling};

    #[test]
    fn renders_labels() {
        let g = Graph::path(2);
        let mut l = Labeling::uniform(&g, "a", "x");
        l.half_edges[0][1] = "y".into();
        let dot = to_dot(&LabeledGraph::new(g, l).unwrap(), "p");
        assert!(dot.contains("0 [label=\"0|a\"]"));
        assert!(dot.contains("0 -- 1 [taillabel=\"x\", headlabel=\"y\"]"));
    }
}
