use std::collections::BTreeMap;

use super::{EdgeId, Graph, LabeledGraph, Labeling, NodeId};
use crate::error::{input, Result};

/// A half-edge visible from inside a view.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Port {
    /// Edge id in the source graph.
    pub source_edge: EdgeId,
    /// Edge id inside the view, `None` when the edge itself is not visible.
    pub edge: Option<EdgeId>,
    pub label: String,
}

/// The radius-`T` view of an anchor set.
///
/// Node ids inside `graph` are view-local; `origin_nodes` and `origin_edges`
/// map them back to the source graph. `ports[v]` lists the half-edges of `v`
/// that the view exposes, in source adjacency order. Edges between two
/// nodes both at distance exactly `T` are dropped together with their
/// half-edges, except that at `T = 0` the anchors keep the labels of all
/// their incident half-edges (with `edge: None`).
#[derive(Clone, Debug)]
pub struct View {
    pub graph: LabeledGraph,
    pub origin_nodes: Vec<NodeId>,
    pub origin_edges: Vec<EdgeId>,
    /// View-local anchor ids, ascending.
    pub anchors: Vec<NodeId>,
    /// Distance of each view node to the anchor set.
    pub layer: Vec<usize>,
    pub radius: usize,
    pub ports: Vec<Vec<Port>>,
}

impl View {
    pub fn node_count(&self) -> usize {
        self.graph.graph.node_count()
    }

    pub fn is_anchor(&self, v: NodeId) -> bool {
        self.anchors.binary_search(&v).is_ok()
    }

    /// View-local id of a source node, if it is inside the view.
    pub fn local(&self, source: NodeId) -> Option<NodeId> {
        self.origin_nodes.iter().position(|&s| s == source)
    }

    /// The single anchor of a single-anchor view.
    pub fn anchor(&self) -> NodeId {
        self.anchors[0]
    }
}

/// Builds the view `V_T(A)` of `anchors` in `g`.
pub fn extract_view(g: &LabeledGraph, anchors: &[NodeId], radius: usize) -> Result<View> {
    if anchors.is_empty() {
        return input("view anchor set is empty");
    }
    for &a in anchors {
        g.graph.check_node(a)?;
    }
    let src: &Graph = &g.graph;
    let dist = src.bfs(anchors.iter().copied());
    let nodes: Vec<NodeId> = (0..src.node_count())
        .filter(|&v| matches!(dist[v], Some(d) if d <= radius))
        .collect();
    let local: BTreeMap<NodeId, NodeId> = nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();

    let near = |v: NodeId| matches!(dist[v], Some(d) if d < radius);
    let mut edges = Vec::new();
    let mut origin_edges = Vec::new();
    let mut local_edge = BTreeMap::new();
    for (e, &(u, v)) in src.edges().iter().enumerate() {
        if local.contains_key(&u) && local.contains_key(&v) && (near(u) || near(v)) {
            local_edge.insert(e, edges.len());
            edges.push((local[&u], local[&v]));
            origin_edges.push(e);
        }
    }
    let adjacency: Vec<Vec<EdgeId>> = nodes
        .iter()
        .map(|&v| src.adjacency(v).iter().filter_map(|e| local_edge.get(e).copied()).collect())
        .collect();
    let graph = Graph::with_adjacency(nodes.len(), src.is_multi(), edges, adjacency)
        .expect("view of a valid graph is valid");
    let labels = Labeling {
        nodes: nodes.iter().map(|&v| g.labels.nodes[v].clone()).collect(),
        half_edges: origin_edges.iter().map(|&e| g.labels.half_edges[e].clone()).collect(),
    };

    let mut anchor_local: Vec<NodeId> = anchors.iter().map(|a| local[a]).collect();
    anchor_local.sort_unstable();
    anchor_local.dedup();

    let ports = nodes
        .iter()
        .map(|&v| {
            let keep_dangling = radius == 0 && dist[v] == Some(0);
            src.adjacency(v)
                .iter()
                .filter_map(|&e| {
                    let edge = local_edge.get(&e).copied();
                    (edge.is_some() || keep_dangling).then(|| Port {
                        source_edge: e,
                        edge,
                        label: g.half_edge_label(v, e).to_string(),
                    })
                })
                .collect()
        })
        .collect();

    Ok(View {
        graph: LabeledGraph {
            graph,
            labels,
            node_alphabet: g.node_alphabet.clone(),
            half_edge_alphabet: g.half_edge_alphabet.clone(),
        },
        layer: nodes.iter().map(|&v| dist[v].unwrap_or(0)).collect(),
        origin_nodes: nodes,
        origin_edges,
        anchors: anchor_local,
        radius,
        ports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::ANON;

    fn anon(g: Graph) -> LabeledGraph {
        LabeledGraph::anonymous(g)
    }

    #[test]
    fn path_radius_one() {
        let v = extract_view(&anon(Graph::path(5)), &[2], 1).unwrap();
        assert_eq!(v.node_count(), 3);
        assert_eq!(v.graph.graph.edge_count(), 2);
        assert_eq!(v.origin_nodes, vec![1, 2, 3]);
        assert_eq!(v.layer, vec![1, 0, 1]);
        // Boundary nodes only expose the half-edges of retained edges.
        assert_eq!(v.ports[0].len(), 1);
        assert_eq!(v.ports[1].len(), 2);
    }

    #[test]
    fn radius_zero_has_no_edges_but_keeps_anchor_half_edges() {
        let g = anon(Graph::path(4));
        let v = extract_view(&g, &[1, 2], 0).unwrap();
        assert_eq!(v.node_count(), 2);
        assert_eq!(v.graph.graph.edge_count(), 0);
        assert_eq!(v.ports[0].len(), 2);
        assert!(v.ports[0].iter().all(|p| p.edge.is_none() && p.label == ANON));
    }

    #[test]
    fn cycle_four_radius_two_keeps_every_edge() {
        // v2 is at distance 2, v1 and v3 at distance 1: every edge has an
        // endpoint strictly inside the radius.
        let v = extract_view(&anon(Graph::cycle(4)), &[0], 2).unwrap();
        assert_eq!(v.node_count(), 4);
        assert_eq!(v.graph.graph.edge_count(), 4);
    }

    #[test]
    fn boundary_edge_is_dropped() {
        // C5 at radius 2: v2 and v3 are both at distance 2.
        let v = extract_view(&anon(Graph::cycle(5)), &[0], 2).unwrap();
        assert_eq!(v.node_count(), 5);
        assert_eq!(v.graph.graph.edge_count(), 4);
    }

    #[test]
    fn empty_anchor_is_an_error() {
        assert!(extract_view(&anon(Graph::path(2)), &[], 1).is_err());
    }
}
