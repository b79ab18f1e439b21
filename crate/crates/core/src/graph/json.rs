use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{Graph, LabeledGraph, Labeling, ANON};
use crate::error::{input, Result};

/// JSON interchange form of a labeled graph.
///
/// Half-edge labels are keyed `"node:edge"`. Missing labels default to
/// [`ANON`]. `role` is only present for incidence graphs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    #[serde(default)]
    pub multi: bool,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adjacency_order: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub half_edge_labels: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_alphabet: Option<BTreeSet<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_edge_alphabet: Option<BTreeSet<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<Vec<String>>,
}

impl GraphJson {
    pub fn from_labeled(g: &LabeledGraph) -> Self {
        let graph = &g.graph;
        let half_edge_labels = graph
            .half_edges()
            .map(|h| (format!("{}:{}", h.node, h.edge), g.labels.half_edge(graph, h).to_string()))
            .collect();
        GraphJson {
            n: graph.node_count(),
            multi: graph.is_multi(),
            edges: graph.edges().iter().map(|&(u, v)| [u, v]).collect(),
            adjacency_order: Some(graph.adjacency_order().to_vec()),
            node_labels: Some(g.labels.nodes.clone()),
            half_edge_labels,
            node_alphabet: Some(g.node_alphabet.clone()),
            half_edge_alphabet: Some(g.half_edge_alphabet.clone()),
            role: None,
        }
    }

    pub fn from_graph(g: &Graph) -> Self {
        GraphJson {
            n: g.node_count(),
            multi: g.is_multi(),
            edges: g.edges().iter().map(|&(u, v)| [u, v]).collect(),
            adjacency_order: Some(g.adjacency_order().to_vec()),
            node_labels: None,
            half_edge_labels: BTreeMap::new(),
            node_alphabet: None,
            half_edge_alphabet: None,
            role: None,
        }
    }

    pub fn to_graph(&self) -> Result<Graph> {
        let edges = self.edges.iter().map(|&[u, v]| (u, v)).collect();
        match &self.adjacency_order {
            Some(adj) => Graph::with_adjacency(self.n, self.multi, edges, adj.clone()),
            None if self.multi => Graph::multigraph(self.n, edges),
            None => Graph::new(self.n, edges),
        }
    }

    pub fn to_labeled(&self) -> Result<LabeledGraph> {
        let graph = self.to_graph()?;
        let mut labels = Labeling::uniform(&graph, ANON, ANON);
        if let Some(nodes) = &self.node_labels {
            if nodes.len() != graph.node_count() {
                return input(format!("{} node labels for {} nodes", nodes.len(), graph.node_count()));
            }
            labels.nodes = nodes.clone();
        }
        for (key, label) in &self.half_edge_labels {
            let parsed = key
                .split_once(':')
                .and_then(|(a, b)| Some((a.parse::<usize>().ok()?, b.parse::<usize>().ok()?)));
            let Some((node, edge)) = parsed else {
                return input(format!("half-edge key {key:?} is not \"node:edge\""));
            };
            if edge >= graph.edge_count() {
                return input(format!("half-edge key {key:?} names an unknown edge"));
            }
            let (a, b) = graph.endpoints(edge);
            if node != a && node != b {
                return input(format!("half-edge key {key:?}: node is not an endpoint"));
            }
            labels.set_half_edge(&graph, super::HalfEdge { node, edge }, label.clone());
        }
        match (&self.node_alphabet, &self.half_edge_alphabet) {
            (Some(na), Some(ha)) => LabeledGraph::with_alphabets(graph, labels, na.clone(), ha.clone()),
            _ => LabeledGraph::new(graph, labels),
        }
    }
}
