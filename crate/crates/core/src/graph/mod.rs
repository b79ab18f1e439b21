//! Undirected graphs with explicit half-edges and labelings.
//!
//! Node ids are dense integers `0..n`; edge ids are dense integers in
//! construction order. Every node carries an ordered list of incident edges
//! (its adjacency order); this ordering is what white-node constraints of
//! linearizable problems read, and it is serialized verbatim.

mod dot;
mod iso;
mod json;
mod view;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};

pub use dot::{to_dot, to_dot_styled};
pub use iso::{
    all_view_isomorphisms, centered_isomorphic, views_isomorphic, Isomorphism,
};
pub use json::GraphJson;
pub use view::{extract_view, Port, View};

pub type NodeId = usize;
pub type EdgeId = usize;

/// Label used for anonymous networks.
pub const ANON: &str = "_";

/// Shortest-path distance; `Infinite` when the nodes are disconnected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Finite(usize),
    Infinite,
}

impl Distance {
    pub fn finite(self) -> Option<usize> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Infinite => None,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Infinite => f.write_str("inf"),
        }
    }
}

/// A half-edge `(node, edge)`; `node` is an endpoint of `edge`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HalfEdge {
    pub node: NodeId,
    pub edge: EdgeId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    multi: bool,
    edges: Vec<(NodeId, NodeId)>,
    adjacency: Vec<Vec<EdgeId>>,
}

impl Graph {
    /// Simple graph; adjacency order follows edge ids.
    pub fn new(n: usize, edges: Vec<(NodeId, NodeId)>) -> Result<Self> {
        Self::build(n, false, edges)
    }

    /// Graph that may contain parallel edges (never self-loops).
    pub fn multigraph(n: usize, edges: Vec<(NodeId, NodeId)>) -> Result<Self> {
        Self::build(n, true, edges)
    }

    fn build(n: usize, multi: bool, edges: Vec<(NodeId, NodeId)>) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for (e, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return input(format!("edge {e} = ({u},{v}) references a node outside 0..{n}"));
            }
            adjacency[u].push(e);
            adjacency[v].push(e);
        }
        Self::with_adjacency(n, multi, edges, adjacency)
    }

    /// Graph with an explicit per-node adjacency order.
    pub fn with_adjacency(
        n: usize,
        multi: bool,
        edges: Vec<(NodeId, NodeId)>,
        adjacency: Vec<Vec<EdgeId>>,
    ) -> Result<Self> {
        if adjacency.len() != n {
            return input(format!("adjacency has {} rows, expected {n}", adjacency.len()));
        }
        let mut seen = BTreeSet::new();
        for (e, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return input(format!("edge {e} = ({u},{v}) references a node outside 0..{n}"));
            }
            if u == v {
                return input(format!("edge {e} is a self-loop at {u}"));
            }
            if !multi && !seen.insert((u.min(v), u.max(v))) {
                return input(format!("parallel edge {e} = ({u},{v}) in a simple graph"));
            }
        }
        let mut count = vec![0usize; edges.len()];
        for (v, row) in adjacency.iter().enumerate() {
            for &e in row {
                let Some(&(a, b)) = edges.get(e) else {
                    return input(format!("adjacency of {v} lists unknown edge {e}"));
                };
                if a != v && b != v {
                    return input(format!("adjacency of {v} lists edge {e} = ({a},{b})"));
                }
                count[e] += 1;
            }
        }
        if let Some(e) = count.iter().position(|&c| c != 2) {
            return input(format!("edge {e} appears {} times in adjacency lists", count[e]));
        }
        for (v, row) in adjacency.iter().enumerate() {
            let distinct: BTreeSet<_> = row.iter().collect();
            if distinct.len() != row.len() {
                return input(format!("adjacency of {v} repeats an edge"));
            }
        }
        Ok(Graph { n, multi, edges, adjacency })
    }

    pub fn path(n: usize) -> Self {
        Self::new(n, (1..n).map(|i| (i - 1, i)).collect()).expect("path is simple")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 nodes");
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n)).collect()).expect("cycle is simple")
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Self::new(n, edges).expect("complete graph is simple")
    }

    /// Star with center 0 and leaves `1..=leaves`.
    pub fn star(leaves: usize) -> Self {
        Self::new(leaves + 1, (1..=leaves).map(|i| (0, i)).collect()).expect("star is simple")
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_multi(&self) -> bool {
        self.multi
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn endpoints(&self, e: EdgeId) -> (NodeId, NodeId) {
        self.edges[e]
    }

    /// Incident edges of `v` in adjacency order.
    pub fn adjacency(&self, v: NodeId) -> &[EdgeId] {
        &self.adjacency[v]
    }

    pub fn adjacency_order(&self) -> &[Vec<EdgeId>] {
        &self.adjacency
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adjacency[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn other(&self, e: EdgeId, v: NodeId) -> NodeId {
        let (a, b) = self.edges[e];
        if a == v {
            b
        } else {
            a
        }
    }

    /// Index of `v` within the endpoint pair of `e` (0 or 1).
    pub fn side(&self, v: NodeId, e: EdgeId) -> usize {
        usize::from(self.edges[e].0 != v)
    }

    /// Neighbors of `v` in adjacency order (repeated for parallel edges).
    pub fn neighbors(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.adjacency[v].iter().map(move |&e| self.other(e, v))
    }

    pub fn find_edge(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        self.adjacency[u].iter().copied().find(|&e| self.other(e, u) == v)
    }

    pub fn half_edges(&self) -> impl Iterator<Item = HalfEdge> + '_ {
        (0..self.n).flat_map(move |node| {
            self.adjacency[node].iter().map(move |&edge| HalfEdge { node, edge })
        })
    }

    pub fn check_node(&self, v: NodeId) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            input(format!("unknown node id {v} (graph has {} nodes)", self.n))
        }
    }

    /// Multi-source BFS; `None` marks unreachable nodes.
    pub fn bfs(&self, sources: impl IntoIterator<Item = NodeId>) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::new();
        for s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap_or(0);
            for w in self.neighbors(u) {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn distance(&self, u: NodeId, v: NodeId) -> Result<Distance> {
        self.check_node(u)?;
        self.check_node(v)?;
        Ok(match self.bfs([u])[v] {
            Some(d) => Distance::Finite(d),
            None => Distance::Infinite,
        })
    }

    /// `N_T[A]`: nodes at distance at most `radius` from the set.
    pub fn neighborhood(&self, anchors: &[NodeId], radius: usize) -> Result<BTreeSet<NodeId>> {
        for &a in anchors {
            self.check_node(a)?;
        }
        let dist = self.bfs(anchors.iter().copied());
        Ok((0..self.n)
            .filter(|&v| matches!(dist[v], Some(d) if d <= radius))
            .collect())
    }

    /// Subgraph induced by `nodes` (kept in the given order).
    ///
    /// Returns the subgraph plus, for each retained edge, its source edge id.
    /// Adjacency order of each node follows its source adjacency order.
    pub fn induced(&self, nodes: &[NodeId]) -> (Graph, Vec<EdgeId>) {
        let index: BTreeMap<NodeId, usize> =
            nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut edges = Vec::new();
        let mut origin = Vec::new();
        let mut local_of = BTreeMap::new();
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            if let (Some(&a), Some(&b)) = (index.get(&u), index.get(&v)) {
                local_of.insert(e, edges.len());
                edges.push((a, b));
                origin.push(e);
            }
        }
        let adjacency = nodes
            .iter()
            .map(|&v| {
                self.adjacency[v]
                    .iter()
                    .filter_map(|e| local_of.get(e).copied())
                    .collect()
            })
            .collect();
        let g = Graph::with_adjacency(nodes.len(), self.multi, edges, adjacency)
            .expect("induced subgraph of a valid graph is valid");
        (g, origin)
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<NodeId>> {
        let mut comp = vec![usize::MAX; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut i = 0;
            while i < members.len() {
                let u = members[i];
                i += 1;
                for w in self.neighbors(u) {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        members.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.components().len() == 1
    }

    /// A proper 2-coloring if one exists.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let mut color: Vec<Option<bool>> = vec![None; self.n];
        for s in 0..self.n {
            if color[s].is_some() {
                continue;
            }
            color[s] = Some(false);
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                let cu = color[u].unwrap_or(false);
                for w in self.neighbors(u) {
                    match color[w] {
                        None => {
                            color[w] = Some(!cu);
                            queue.push_back(w);
                        }
                        Some(cw) if cw == cu => return None,
                        Some(_) => {}
                    }
                }
            }
        }
        Some(color.into_iter().map(|c| c.unwrap_or(false)).collect())
    }
}

/// Node labels plus one label per half-edge.
///
/// `half_edges[e][s]` is the label of the half-edge at endpoint `s` of edge
/// `e` (`s = 0` for the first endpoint as stored in the graph).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Labeling {
    pub nodes: Vec<String>,
    pub half_edges: Vec<[String; 2]>,
}

impl Labeling {
    pub fn uniform(graph: &Graph, node: &str, half_edge: &str) -> Self {
        Labeling {
            nodes: vec![node.to_string(); graph.node_count()],
            half_edges: vec![[half_edge.to_string(), half_edge.to_string()]; graph.edge_count()],
        }
    }

    pub fn half_edge(&self, graph: &Graph, h: HalfEdge) -> &str {
        &self.half_edges[h.edge][graph.side(h.node, h.edge)]
    }

    pub fn set_half_edge(&mut self, graph: &Graph, h: HalfEdge, label: impl Into<String>) {
        self.half_edges[h.edge][graph.side(h.node, h.edge)] = label.into();
    }

    /// Checks that the labeling covers exactly the nodes and edges of `graph`.
    pub fn check_domain(&self, graph: &Graph) -> Result<()> {
        if self.nodes.len() != graph.node_count() || self.half_edges.len() != graph.edge_count() {
            return input(format!(
                "labeling covers {} nodes / {} edges, graph has {} / {}",
                self.nodes.len(),
                self.half_edges.len(),
                graph.node_count(),
                graph.edge_count()
            ));
        }
        Ok(())
    }
}

/// A graph together with a total labeling over declared finite alphabets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    pub graph: Graph,
    pub labels: Labeling,
    pub node_alphabet: BTreeSet<String>,
    pub half_edge_alphabet: BTreeSet<String>,
}

impl LabeledGraph {
    /// Labeled graph whose alphabets are exactly the labels in use.
    pub fn new(graph: Graph, labels: Labeling) -> Result<Self> {
        labels.check_domain(&graph)?;
        let node_alphabet = labels.nodes.iter().cloned().collect();
        let half_edge_alphabet = labels.half_edges.iter().flatten().cloned().collect();
        Ok(LabeledGraph { graph, labels, node_alphabet, half_edge_alphabet })
    }

    pub fn with_alphabets(
        graph: Graph,
        labels: Labeling,
        node_alphabet: BTreeSet<String>,
        half_edge_alphabet: BTreeSet<String>,
    ) -> Result<Self> {
        labels.check_domain(&graph)?;
        if let Some(bad) = labels.nodes.iter().find(|l| !node_alphabet.contains(*l)) {
            return input(format!("node label {bad:?} outside the declared alphabet"));
        }
        if let Some(bad) = labels.half_edges.iter().flatten().find(|l| !half_edge_alphabet.contains(*l)) {
            return input(format!("half-edge label {bad:?} outside the declared alphabet"));
        }
        Ok(LabeledGraph { graph, labels, node_alphabet, half_edge_alphabet })
    }

    /// Every node and half-edge labeled [`ANON`].
    pub fn anonymous(graph: Graph) -> Self {
        let labels = Labeling::uniform(&graph, ANON, ANON);
        Self::new(graph, labels).expect("uniform labeling covers the graph")
    }

    pub fn node_label(&self, v: NodeId) -> &str {
        &self.labels.nodes[v]
    }

    pub fn half_edge_label(&self, node: NodeId, edge: EdgeId) -> &str {
        self.labels.half_edge(&self.graph, HalfEdge { node, edge })
    }

    /// Induced labeled subgraph on `nodes`, with source edge ids.
    pub fn induced(&self, nodes: &[NodeId]) -> (LabeledGraph, Vec<EdgeId>) {
        let (graph, origin) = self.graph.induced(nodes);
        let node_labels = nodes.iter().map(|&v| self.labels.nodes[v].clone()).collect();
        let half_edges = origin
            .iter()
            .map(|&e| {
                // The induced graph keeps the endpoint order of the source edge.
                self.labels.half_edges[e].clone()
            })
            .collect();
        let labels = Labeling { nodes: node_labels, half_edges };
        (
            LabeledGraph {
                graph,
                labels,
                node_alphabet: self.node_alphabet.clone(),
                half_edge_alphabet: self.half_edge_alphabet.clone(),
            },
            origin,
        )
    }
}

/// A labeled graph with a distinguished center node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CenteredGraph {
    pub graph: LabeledGraph,
    pub center: NodeId,
}

impl CenteredGraph {
    pub fn eccentricity(&self) -> Distance {
        let dist = self.graph.graph.bfs([self.center]);
        if dist.iter().any(Option::is_none) {
            Distance::Infinite
        } else {
            Distance::Finite(dist.iter().flatten().copied().max().unwrap_or(0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_examples() {
        let p = Graph::path(3);
        assert_eq!(p.distance(0, 2).unwrap(), Distance::Finite(2));
        assert_eq!(p.distance(1, 1).unwrap(), Distance::Finite(0));
        let two = Graph::new(4, vec![(0, 1), (2, 3)]).unwrap();
        assert_eq!(two.distance(0, 3).unwrap(), Distance::Infinite);
        assert!(p.distance(0, 7).is_err());
    }

    #[test]
    fn neighborhood_examples() {
        let p = Graph::path(5);
        assert_eq!(p.neighborhood(&[2], 1).unwrap(), BTreeSet::from([1, 2, 3]));
        let all: Vec<_> = (0..5).collect();
        assert_eq!(p.neighborhood(&all, 0).unwrap(), all.iter().copied().collect());
        let c6 = Graph::cycle(6);
        assert_eq!(c6.neighborhood(&[0], 2).unwrap(), BTreeSet::from([4, 5, 0, 1, 2]));
    }

    #[test]
    fn rejects_loops_and_parallel_edges() {
        assert!(Graph::new(2, vec![(0, 0)]).is_err());
        assert!(Graph::new(2, vec![(0, 1), (1, 0)]).is_err());
        assert!(Graph::multigraph(2, vec![(0, 1), (1, 0)]).is_ok());
        assert!(Graph::multigraph(2, vec![(1, 1)]).is_err());
    }

    #[test]
    fn adjacency_must_match_edges() {
        let bad = Graph::with_adjacency(2, false, vec![(0, 1)], vec![vec![0], vec![]]);
        assert!(bad.is_err());
        let ok = Graph::with_adjacency(3, false, vec![(0, 1), (0, 2)], vec![vec![1, 0], vec![0], vec![1]])
            .unwrap();
        assert_eq!(ok.adjacency(0), &[1, 0]);
        assert_eq!(ok.neighbors(0).collect::<Vec<_>>(), vec![2, 1]);
    }

    #[test]
    fn labeled_graph_alphabet_checks() {
        let g = Graph::path(2);
        let labels = Labeling::uniform(&g, "a", "x");
        let ok = LabeledGraph::with_alphabets(
            g.clone(),
            labels.clone(),
            BTreeSet::from(["a".into(), "b".into()]),
            BTreeSet::from(["x".into()]),
        );
        assert!(ok.is_ok());
        let bad = LabeledGraph::with_alphabets(g, labels, BTreeSet::from(["b".into()]), BTreeSet::from(["x".into()]));
        assert!(bad.is_err());
    }

    #[test]
    fn bipartition_and_components() {
        assert!(Graph::cycle(4).bipartition().is_some());
        assert!(Graph::cycle(5).bipartition().is_none());
        let g = Graph::new(5, vec![(0, 1), (3, 4)]).unwrap();
        assert_eq!(g.components(), vec![vec![0, 1], vec![2], vec![3, 4]]);
    }
}
