//! Exact isomorphism search for small anchored labeled graphs.
//!
//! Candidates are pruned by node label, anchor membership, distance to the
//! anchors, degree, and the multiset of incident half-edge labels; the rest
//! is plain backtracking in BFS order from the anchors.

use std::collections::BTreeMap;

use super::{CenteredGraph, EdgeId, LabeledGraph, NodeId, View};

/// Node and edge bijection between two anchored graphs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isomorphism {
    pub nodes: Vec<NodeId>,
    pub edges: Vec<EdgeId>,
}

impl Isomorphism {
    pub fn inverse(&self) -> Isomorphism {
        let mut nodes = vec![0; self.nodes.len()];
        for (a, &b) in self.nodes.iter().enumerate() {
            nodes[b] = a;
        }
        let mut edges = vec![0; self.edges.len()];
        for (a, &b) in self.edges.iter().enumerate() {
            edges[b] = a;
        }
        Isomorphism { nodes, edges }
    }
}

type Link<'a> = (&'a str, &'a str);

struct Pattern<'a> {
    g: &'a LabeledGraph,
    anchor: Vec<bool>,
    layer: Vec<usize>,
    dangling: Vec<Vec<&'a str>>,
    incident: Vec<Vec<&'a str>>,
    links: Vec<BTreeMap<NodeId, Vec<Link<'a>>>>,
    order: Vec<NodeId>,
    parent: Vec<Option<NodeId>>,
}

impl<'a> Pattern<'a> {
    fn new(g: &'a LabeledGraph, anchors: &[NodeId], dangling: Vec<Vec<&'a str>>) -> Self {
        let graph = &g.graph;
        let n = graph.node_count();
        let mut anchor = vec![false; n];
        for &a in anchors {
            anchor[a] = true;
        }
        let dist = graph.bfs(anchors.iter().copied());
        let layer = dist.iter().map(|d| d.unwrap_or(usize::MAX)).collect();
        let mut links: Vec<BTreeMap<NodeId, Vec<Link<'a>>>> = vec![BTreeMap::new(); n];
        let mut incident = vec![Vec::new(); n];
        for (e, &(u, v)) in graph.edges().iter().enumerate() {
            let [lu, lv] = &g.labels.half_edges[e];
            links[u].entry(v).or_default().push((lu.as_str(), lv.as_str()));
            links[v].entry(u).or_default().push((lv.as_str(), lu.as_str()));
            incident[u].push(lu.as_str());
            incident[v].push(lv.as_str());
        }
        for row in &mut links {
            for sig in row.values_mut() {
                sig.sort_unstable();
            }
        }
        for row in &mut incident {
            row.sort_unstable();
        }

        let mut order = Vec::with_capacity(n);
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        let starts: Vec<NodeId> = anchors.iter().copied().chain(0..n).collect();
        for s in starts {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut i = order.len();
            order.push(s);
            while i < order.len() {
                let u = order[i];
                i += 1;
                for w in graph.neighbors(u) {
                    if !seen[w] {
                        seen[w] = true;
                        parent[w] = Some(u);
                        order.push(w);
                    }
                }
            }
        }
        Pattern { g, anchor, layer, dangling, incident, links, order, parent }
    }

    fn label(&self, v: NodeId) -> &str {
        &self.g.labels.nodes[v]
    }

    fn n(&self) -> usize {
        self.anchor.len()
    }

    fn signature(&self, v: NodeId) -> (&str, bool, usize, &[&'a str], &[&'a str]) {
        (self.label(v), self.anchor[v], self.layer[v], &self.incident[v], &self.dangling[v])
    }
}

fn quick_reject(a: &Pattern<'_>, b: &Pattern<'_>) -> bool {
    if a.n() != b.n() || a.g.graph.edge_count() != b.g.graph.edge_count() {
        return true;
    }
    let mut sa: Vec<_> = (0..a.n()).map(|v| a.signature(v)).collect();
    let mut sb: Vec<_> = (0..b.n()).map(|v| b.signature(v)).collect();
    sa.sort_unstable();
    sb.sort_unstable();
    sa != sb
}

struct Search<'p, 'a, F> {
    a: &'p Pattern<'a>,
    b: &'p Pattern<'a>,
    map: Vec<Option<NodeId>>,
    used: Vec<bool>,
    visit: F,
    found: usize,
    limit: usize,
}

impl<'p, 'a, F: FnMut(&Isomorphism) -> bool> Search<'p, 'a, F> {
    /// Returns false when the enumeration should stop.
    fn run(&mut self, depth: usize) -> bool {
        if depth == self.a.n() {
            let iso = self.finish();
            self.found += 1;
            return (self.visit)(&iso) && self.found < self.limit;
        }
        let u = self.a.order[depth];
        let candidates: Vec<NodeId> = match self.a.parent[u].and_then(|p| self.map[p]) {
            Some(pb) => {
                let mut c: Vec<NodeId> = self.b.links[pb].keys().copied().collect();
                c.dedup();
                c
            }
            None => (0..self.b.n()).collect(),
        };
        for c in candidates {
            if self.used[c] || self.a.signature(u) != self.b.signature(c) || !self.consistent(u, c) {
                continue;
            }
            self.map[u] = Some(c);
            self.used[c] = true;
            let go_on = self.run(depth + 1);
            self.map[u] = None;
            self.used[c] = false;
            if !go_on {
                return false;
            }
        }
        true
    }

    fn consistent(&self, u: NodeId, c: NodeId) -> bool {
        let mut mapped = 0;
        for (w, sig) in &self.a.links[u] {
            if let Some(wb) = self.map[*w] {
                mapped += 1;
                if self.b.links[c].get(&wb) != Some(sig) {
                    return false;
                }
            }
        }
        let mapped_b = self.b.links[c].keys().filter(|x| self.used[**x]).count();
        mapped == mapped_b
    }

    fn finish(&self) -> Isomorphism {
        let nodes: Vec<NodeId> = self.map.iter().map(|m| m.expect("complete mapping")).collect();
        let gb = &self.b.g.graph;
        let mut taken = vec![false; gb.edge_count()];
        let mut edges = Vec::with_capacity(self.a.g.graph.edge_count());
        for (e, &(u, v)) in self.a.g.graph.edges().iter().enumerate() {
            let [lu, lv] = &self.a.g.labels.half_edges[e];
            let (bu, bv) = (nodes[u], nodes[v]);
            let hit = gb.adjacency(bu).iter().copied().find(|&f| {
                !taken[f]
                    && gb.other(f, bu) == bv
                    && self.b.g.half_edge_label(bu, f) == lu
                    && self.b.g.half_edge_label(bv, f) == lv
            });
            let f = hit.expect("link signatures guarantee a matching edge");
            taken[f] = true;
            edges.push(f);
        }
        Isomorphism { nodes, edges }
    }
}

fn enumerate<F: FnMut(&Isomorphism) -> bool>(
    a: &Pattern<'_>,
    b: &Pattern<'_>,
    limit: usize,
    visit: F,
) -> (usize, bool) {
    if quick_reject(a, b) {
        return (0, true);
    }
    let mut s = Search {
        a,
        b,
        map: vec![None; a.n()],
        used: vec![false; b.n()],
        visit,
        found: 0,
        limit: limit.max(1),
    };
    let complete = s.run(0);
    (s.found, complete)
}

fn view_pattern(v: &View) -> Pattern<'_> {
    let dangling = v
        .ports
        .iter()
        .map(|ports| {
            let mut d: Vec<&str> =
                ports.iter().filter(|p| p.edge.is_none()).map(|p| p.label.as_str()).collect();
            d.sort_unstable();
            d
        })
        .collect();
    Pattern::new(&v.graph, &v.anchors, dangling)
}

/// Finds a bijection mapping anchors onto anchors that preserves adjacency
/// and every node and half-edge label.
pub fn views_isomorphic(a: &View, b: &View) -> Option<Isomorphism> {
    if a.radius != b.radius {
        return None;
    }
    let (pa, pb) = (view_pattern(a), view_pattern(b));
    let mut out = None;
    enumerate(&pa, &pb, 1, |iso| {
        out = Some(iso.clone());
        false
    });
    out
}

/// Visits every view isomorphism from `a` to `b`, stopping after `limit`
/// or when `visit` returns false. Returns the number visited and whether
/// the enumeration ran to completion.
pub fn all_view_isomorphisms(
    a: &View,
    b: &View,
    limit: usize,
    visit: impl FnMut(&Isomorphism) -> bool,
) -> (usize, bool) {
    if a.radius != b.radius {
        return (0, true);
    }
    let (pa, pb) = (view_pattern(a), view_pattern(b));
    enumerate(&pa, &pb, limit, visit)
}

/// Isomorphism of centered labeled graphs mapping center to center.
pub fn centered_isomorphic(a: &CenteredGraph, b: &CenteredGraph) -> Option<Isomorphism> {
    let pa = Pattern::new(&a.graph, &[a.center], vec![Vec::new(); a.graph.graph.node_count()]);
    let pb = Pattern::new(&b.graph, &[b.center], vec![Vec::new(); b.graph.graph.node_count()]);
    let mut out = None;
    enumerate(&pa, &pb, 1, |iso| {
        out = Some(iso.clone());
        false
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{extract_view, Graph, Labeling};

    fn view(g: Graph, a: NodeId, t: usize) -> View {
        extract_view(&LabeledGraph::anonymous(g), &[a], t).unwrap()
    }

    #[test]
    fn interior_path_views_match() {
        let iso = views_isomorphic(&view(Graph::path(7), 3, 1), &view(Graph::path(9), 4, 1));
        let iso = iso.expect("symmetric interiors");
        assert_eq!(iso.nodes[1], 1);
    }

    #[test]
    fn degree_mismatch() {
        let a = view(Graph::path(5), 2, 1);
        let b = view(Graph::star(3), 0, 1);
        assert!(views_isomorphic(&a, &b).is_none());
    }

    #[test]
    fn c4_and_c5_radius_one_views_match() {
        let a = view(Graph::cycle(4), 0, 1);
        let b = view(Graph::cycle(5), 0, 1);
        assert!(views_isomorphic(&a, &b).is_some());
        // Two automorphisms: identity and the reflection through the anchor.
        let (count, complete) = all_view_isomorphisms(&a, &b, 100, |_| true);
        assert_eq!((count, complete), (2, true));
    }

    #[test]
    fn labels_are_respected() {
        let g = Graph::path(3);
        let mut l1 = Labeling::uniform(&g, "a", "x");
        let l2 = l1.clone();
        l1.nodes[2] = "b".into();
        let v1 = extract_view(&LabeledGraph::new(g.clone(), l1).unwrap(), &[1], 1).unwrap();
        let v2 = extract_view(&LabeledGraph::new(g, l2).unwrap(), &[1], 1).unwrap();
        assert!(views_isomorphic(&v1, &v2).is_none());
    }

    #[test]
    fn parallel_edges_are_mapped() {
        let g = Graph::multigraph(2, vec![(0, 1), (0, 1)]).unwrap();
        let mut l = Labeling::uniform(&g, "n", "p");
        l.half_edges[1] = ["q".into(), "p".into()];
        let lg = LabeledGraph::new(g, l).unwrap();
        let h = Graph::multigraph(2, vec![(1, 0), (0, 1)]).unwrap();
        let mut m = Labeling::uniform(&h, "n", "p");
        m.half_edges[0] = ["p".into(), "q".into()];
        let lh = LabeledGraph::new(h, m).unwrap();
        let a = extract_view(&lg, &[0], 1).unwrap();
        let b = extract_view(&lh, &[0], 1).unwrap();
        let iso = views_isomorphic(&a, &b).unwrap();
        assert_eq!(iso.edges, vec![1, 0]);
    }

    #[test]
    fn inverse_round_trip() {
        let a = view(Graph::cycle(6), 0, 2);
        let b = view(Graph::cycle(7), 3, 2);
        let iso = views_isomorphic(&a, &b).unwrap();
        let back = iso.inverse();
        for v in 0..iso.nodes.len() {
            assert_eq!(back.nodes[iso.nodes[v]], v);
        }
    }
}
