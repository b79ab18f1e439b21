//! Linearizable edge-labeling problems on bipartite incidence graphs, the
//! maximal-matching instance, and the one-round greedy SLOCAL matcher.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{contract, input, Result};
use crate::graph::{EdgeId, Graph, GraphJson, Labeling, NodeId, ANON};
use crate::outcome::{NodeOutput, SlocalAlgorithm, StepContext};

pub const MATCHED: &str = "M";
pub const BEFORE: &str = "B";
pub const AFTER: &str = "A";
pub const PTR: &str = "Ptr";

/// `(Σ, F, L, pairs, B)` plus a bound on black degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearizableProblem {
    pub sigma: BTreeSet<String>,
    pub first: BTreeSet<String>,
    pub last: BTreeSet<String>,
    pub pairs: BTreeSet<(String, String)>,
    /// Allowed black configurations, each a sorted multiset.
    pub black: BTreeSet<Vec<String>>,
    pub rank: usize,
}

impl LinearizableProblem {
    pub fn new(
        sigma: BTreeSet<String>,
        first: BTreeSet<String>,
        last: BTreeSet<String>,
        pairs: BTreeSet<(String, String)>,
        black: impl IntoIterator<Item = Vec<String>>,
        rank: usize,
    ) -> Result<Self> {
        if first.is_empty() || last.is_empty() {
            return input("first and last label sets must be nonempty");
        }
        let outside = |s: &str| !sigma.contains(s);
        if let Some(bad) = first.iter().chain(&last).find(|s| outside(s)) {
            return input(format!("label {bad:?} is not in the alphabet"));
        }
        if let Some((a, b)) = pairs.iter().find(|(a, b)| outside(a) || outside(b)) {
            return input(format!("pair ({a:?}, {b:?}) uses labels outside the alphabet"));
        }
        let mut configs = BTreeSet::new();
        for mut m in black {
            if m.len() > rank {
                return input(format!("black configuration {m:?} exceeds rank {rank}"));
            }
            if let Some(bad) = m.iter().find(|s| outside(s)) {
                return input(format!("black configuration uses {bad:?} outside the alphabet"));
            }
            m.sort();
            configs.insert(m);
        }
        Ok(LinearizableProblem { sigma, first, last, pairs, black: configs, rank })
    }

    /// The maximal-matching encoding: `Σ = {M, B, A, Ptr}`.
    pub fn maximal_matching() -> Self {
        let set = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
        let pair = |a: &str, b: &str| (a.to_string(), b.to_string());
        let multiset = |a: &str, b: &str| vec![a.to_string(), b.to_string()];
        Self::new(
            set(&[MATCHED, BEFORE, AFTER, PTR]),
            set(&[MATCHED, BEFORE, PTR]),
            set(&[MATCHED, AFTER, PTR]),
            [
                pair(BEFORE, BEFORE),
                pair(BEFORE, MATCHED),
                pair(MATCHED, AFTER),
                pair(AFTER, AFTER),
                pair(PTR, PTR),
            ]
            .into_iter()
            .collect(),
            [
                multiset(MATCHED, MATCHED),
                multiset(PTR, BEFORE),
                multiset(PTR, AFTER),
                multiset(BEFORE, BEFORE),
                multiset(BEFORE, AFTER),
                multiset(AFTER, AFTER),
            ],
            2,
        )
        .expect("the matching encoding is well formed")
    }

    /// Whether an ordered white string is allowed. The empty string (a
    /// white node without edges) is accepted.
    pub fn white_ok(&self, s: &[&str]) -> bool {
        let (Some(first), Some(last)) = (s.first(), s.last()) else {
            return true;
        };
        self.first.contains(*first)
            && self.last.contains(*last)
            && s.windows(2).all(|w| self.pairs.contains(&(w[0].to_string(), w[1].to_string())))
    }

    pub fn black_ok(&self, labels: &[&str]) -> bool {
        let mut m: Vec<String> = labels.iter().map(|s| s.to_string()).collect();
        m.sort();
        self.black.contains(&m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    White,
    Black,
}

/// A bipartite graph of white (node) and black (hyperedge) vertices.
///
/// The adjacency order of a white vertex is its edge ordering. `blacks[i]`
/// is the black vertex of hyperedge `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceGraph {
    pub graph: Graph,
    pub roles: Vec<Role>,
    pub whites: Vec<NodeId>,
    pub blacks: Vec<NodeId>,
}

impl IncidenceGraph {
    pub fn new(graph: Graph, roles: Vec<Role>) -> Result<Self> {
        if roles.len() != graph.node_count() {
            return input("one role per node is required");
        }
        if let Some((e, _)) = graph.edges().iter().enumerate().find(|(_, &(a, b))| roles[a] == roles[b]) {
            return input(format!("edge {e} joins two nodes of the same role"));
        }
        let pick = |r: Role| (0..graph.node_count()).filter(|&v| roles[v] == r).collect();
        Ok(IncidenceGraph { whites: pick(Role::White), blacks: pick(Role::Black), graph, roles })
    }

    /// Incidence graph of `g`: white `v` for node `v`, black `n + e` for
    /// edge `e`. Edge `2e + s` joins black `n + e` to endpoint `s` of `e`,
    /// and each white keeps the adjacency order of its node in `g`.
    pub fn from_graph(g: &Graph) -> Self {
        let n = g.node_count();
        let m = g.edge_count();
        let mut edges = Vec::with_capacity(2 * m);
        for &(a, b) in g.edges() {
            let black = n + edges.len() / 2;
            edges.push((a, black));
            edges.push((b, black));
        }
        let mut adjacency: Vec<Vec<EdgeId>> =
            (0..n).map(|v| g.adjacency(v).iter().map(|&e| 2 * e + g.side(v, e)).collect()).collect();
        adjacency.extend((0..m).map(|e| vec![2 * e, 2 * e + 1]));
        let graph = Graph::with_adjacency(n + m, false, edges, adjacency).expect("incidence graph is simple");
        let mut roles = vec![Role::White; n];
        roles.extend(std::iter::repeat_n(Role::Black, m));
        IncidenceGraph { graph, roles, whites: (0..n).collect(), blacks: (n..n + m).collect() }
    }

    pub fn rank(&self) -> usize {
        self.blacks.iter().map(|&b| self.graph.degree(b)).max().unwrap_or(0)
    }

    /// Whites incident to hyperedge `i`.
    pub fn members(&self, i: usize) -> Vec<NodeId> {
        self.graph.neighbors(self.blacks[i]).collect()
    }

    fn check_labels<'a>(&self, p: &LinearizableProblem, lab: &'a [String]) -> Result<&'a [String]> {
        if lab.len() != self.graph.edge_count() {
            return input(format!("{} labels for {} edges", lab.len(), self.graph.edge_count()));
        }
        if let Some(bad) = lab.iter().find(|l| !p.sigma.contains(*l)) {
            return input(format!("label {bad:?} is outside the alphabet"));
        }
        Ok(lab)
    }

    /// Ordered labels around a white node.
    pub fn white_string<'a>(&self, v: NodeId, lab: &'a [String]) -> Vec<&'a str> {
        self.graph.adjacency(v).iter().map(|&e| lab[e].as_str()).collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinVerdict {
    pub white_violations: Vec<NodeId>,
    pub black_violations: Vec<NodeId>,
}

impl LinVerdict {
    pub fn is_ok(&self) -> bool {
        self.white_violations.is_empty() && self.black_violations.is_empty()
    }
}

pub fn verify_linearizable(p: &LinearizableProblem, g: &IncidenceGraph, lab: &[String]) -> Result<LinVerdict> {
    let lab = g.check_labels(p, lab)?;
    if g.rank() > p.rank {
        return input(format!("black degree {} exceeds rank {}", g.rank(), p.rank));
    }
    let white_violations = g.whites.iter().copied().filter(|&v| !p.white_ok(&g.white_string(v, lab))).collect();
    let black_violations = g.blacks.iter().copied().filter(|&b| !p.black_ok(&g.white_string(b, lab))).collect();
    Ok(LinVerdict { white_violations, black_violations })
}

/// Why an edge set is not a maximal matching.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatchingDefect {
    UnknownEdge(usize),
    Repeated(usize),
    /// Two chosen edges share `node`.
    SharedNode { node: NodeId, edges: (usize, usize) },
    /// An edge with no matched endpoint.
    Augmenting(usize),
}

impl std::fmt::Display for MatchingDefect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MatchingDefect::UnknownEdge(e) => write!(f, "unknown edge {e}"),
            MatchingDefect::Repeated(e) => write!(f, "edge {e} listed twice"),
            MatchingDefect::SharedNode { node, edges: (a, b) } => {
                write!(f, "not a matching: edges {a} and {b} share node {node}")
            }
            MatchingDefect::Augmenting(e) => write!(f, "not maximal: edge {e} can be added"),
        }
    }
}

/// Maximality over hyperedges given as member lists.
fn hypermatching_defect(n: usize, hyperedges: &[Vec<NodeId>], chosen: &[usize]) -> Option<MatchingDefect> {
    let mut owner: Vec<Option<usize>> = vec![None; n];
    let mut seen = BTreeSet::new();
    for &e in chosen {
        if e >= hyperedges.len() {
            return Some(MatchingDefect::UnknownEdge(e));
        }
        if !seen.insert(e) {
            return Some(MatchingDefect::Repeated(e));
        }
        for &v in &hyperedges[e] {
            if let Some(f) = owner[v] {
                return Some(MatchingDefect::SharedNode { node: v, edges: (f, e) });
            }
            owner[v] = Some(e);
        }
    }
    (0..hyperedges.len()).find(|&e| hyperedges[e].iter().all(|&v| owner[v].is_none())).map(MatchingDefect::Augmenting)
}

/// Checks that `matching` is a maximal matching of `g`.
pub fn is_maximal_matching(g: &Graph, matching: &[EdgeId]) -> Option<MatchingDefect> {
    let hyperedges: Vec<Vec<NodeId>> = g.edges().iter().map(|&(a, b)| vec![a, b]).collect();
    hypermatching_defect(g.node_count(), &hyperedges, matching)
}

/// Maximal matching of the hypergraph whose hyperedges are the blacks.
pub fn is_maximal_hypermatching(g: &IncidenceGraph, chosen: &[usize]) -> Option<MatchingDefect> {
    let hyperedges: Vec<Vec<NodeId>> = (0..g.blacks.len()).map(|i| g.members(i)).collect();
    hypermatching_defect(g.graph.node_count(), &hyperedges, chosen)
}

/// Hyperedges (indices into `blacks`) whose incident labels are all `M`.
pub fn decode_to_matching(g: &IncidenceGraph, lab: &[String]) -> Result<Vec<usize>> {
    let p = LinearizableProblem::maximal_matching();
    let verdict = verify_linearizable(&p, g, lab)?;
    if !verdict.is_ok() {
        return contract(format!("labeling is not valid: {verdict:?}"));
    }
    let matched: Vec<usize> = (0..g.blacks.len())
        .filter(|&i| {
            let b = g.blacks[i];
            g.graph.degree(b) > 0 && g.graph.adjacency(b).iter().all(|&e| lab[e] == MATCHED)
        })
        .collect();
    if let Some(defect) = is_maximal_hypermatching(g, &matched) {
        return contract(format!("valid labeling decoded to a non-maximal matching: {defect}"));
    }
    Ok(matched)
}

/// Labels a maximal matching: matched whites write `B* M A*` along their
/// ordering, unmatched whites write `Ptr` everywhere.
pub fn encode_matching(g: &IncidenceGraph, matching: &[usize]) -> Result<Vec<String>> {
    if let Some(b) = g.blacks.iter().find(|&&b| g.graph.degree(b) != 2) {
        return input(format!("black node {b} does not have degree 2"));
    }
    if let Some(defect) = is_maximal_hypermatching(g, matching) {
        return input(defect.to_string());
    }
    let matched_black: BTreeSet<NodeId> = matching.iter().map(|&i| g.blacks[i]).collect();
    let mut lab = vec![String::new(); g.graph.edge_count()];
    for &v in &g.whites {
        let adj = g.graph.adjacency(v);
        let pos = adj.iter().position(|&e| matched_black.contains(&g.graph.other(e, v)));
        for (i, &e) in adj.iter().enumerate() {
            lab[e] = match pos {
                None => PTR,
                Some(p) if i < p => BEFORE,
                Some(p) if i == p => MATCHED,
                Some(_) => AFTER,
            }
            .to_string();
        }
    }
    Ok(lab)
}

/// Converts half-edge labels of `g` to edge labels of its incidence graph.
pub fn incidence_labels(g: &Graph, l: &Labeling) -> Result<Vec<String>> {
    l.check_domain(g)?;
    Ok(l.half_edges.iter().flat_map(|[a, b]| [a.clone(), b.clone()]).collect())
}

/// Inverse of [`incidence_labels`]; node labels become [`ANON`].
pub fn half_edge_labels(g: &Graph, lab: &[String]) -> Result<Labeling> {
    if lab.len() != 2 * g.edge_count() {
        return input("incidence labeling has the wrong length");
    }
    Ok(Labeling {
        nodes: vec![ANON.to_string(); g.node_count()],
        half_edges: lab.chunks(2).map(|c| [c[0].clone(), c[1].clone()]).collect(),
    })
}

/// Greedy maximal matching: an unmatched node matches its smallest-id
/// unmatched neighbor. A step writes the state of the current node and of
/// the chosen neighbor; each state holds the matched edge, if any.
///
/// Output: the encoding labels on the current node's half-edges.
#[derive(Clone, Copy, Debug, Default)]
pub struct GreedyMatching;

impl SlocalAlgorithm for GreedyMatching {
    type State = Option<EdgeId>;

    fn name(&self) -> &str {
        "greedy-matching"
    }

    fn locality(&self) -> usize {
        1
    }

    fn step(&self, ctx: &mut StepContext<'_, Option<EdgeId>>) -> Result<NodeOutput> {
        let view = ctx.view(1)?;
        let v = ctx.node();
        let anchor = view.anchor();
        if ctx.state(v)?.is_none() {
            let mut best: Option<(NodeId, EdgeId)> = None;
            for port in &view.ports[anchor] {
                let local_edge = port.edge.expect("radius 1 keeps the anchor's edges");
                let u = view.origin_nodes[view.graph.graph.other(local_edge, anchor)];
                if ctx.state(u)?.is_none() && best.is_none_or(|b| (u, port.source_edge) < b) {
                    best = Some((u, port.source_edge));
                }
            }
            if let Some((u, e)) = best {
                ctx.set_state(v, Some(e))?;
                ctx.set_state(u, Some(e))?;
            }
        }
        let mine = *ctx.state(v)?;
        let edges: Vec<EdgeId> = view.ports[anchor].iter().map(|p| p.source_edge).collect();
        let pos = mine.and_then(|m| edges.iter().position(|&e| e == m));
        let ports = (0..edges.len())
            .map(|i| {
                match pos {
                    None => PTR,
                    Some(p) if i < p => BEFORE,
                    Some(p) if i == p => MATCHED,
                    Some(_) => AFTER,
                }
                .to_string()
            })
            .collect();
        Ok(NodeOutput::new(ANON, ports))
    }
}

/// Edges matched in a finished greedy run.
pub fn greedy_matching_edges(g: &Graph, states: &[Option<EdgeId>]) -> Vec<EdgeId> {
    (0..g.edge_count())
        .filter(|&e| {
            let (a, b) = g.endpoints(e);
            states[a] == Some(e) && states[b] == Some(e)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LinearizableProblemJson {
    pub sigma: BTreeSet<String>,
    pub first: BTreeSet<String>,
    pub last: BTreeSet<String>,
    pub pairs: Vec<[String; 2]>,
    pub black: Vec<Vec<String>>,
    pub rank: usize,
}

impl LinearizableProblemJson {
    pub fn from_problem(p: &LinearizableProblem) -> Self {
        LinearizableProblemJson {
            sigma: p.sigma.clone(),
            first: p.first.clone(),
            last: p.last.clone(),
            pairs: p.pairs.iter().map(|(a, b)| [a.clone(), b.clone()]).collect(),
            black: p.black.iter().cloned().collect(),
            rank: p.rank,
        }
    }

    pub fn to_problem(&self) -> Result<LinearizableProblem> {
        LinearizableProblem::new(
            self.sigma.clone(),
            self.first.clone(),
            self.last.clone(),
            self.pairs.iter().map(|[a, b]| (a.clone(), b.clone())).collect(),
            self.black.clone(),
            self.rank,
        )
    }
}

/// Incidence graph as graph JSON with a `role` array.
pub fn incidence_to_json(g: &IncidenceGraph) -> GraphJson {
    let mut j = GraphJson::from_graph(&g.graph);
    j.role = Some(
        g.roles
            .iter()
            .map(|r| match r {
                Role::White => "white",
                Role::Black => "black",
            })
            .map(String::from)
            .collect(),
    );
    j
}

pub fn incidence_from_json(j: &GraphJson) -> Result<IncidenceGraph> {
    let graph = j.to_graph()?;
    let Some(roles) = &j.role else {
        // A plain graph is read as the source of an incidence graph.
        return Ok(IncidenceGraph::from_graph(&graph));
    };
    let roles = roles
        .iter()
        .map(|r| match r.as_str() {
            "white" => Ok(Role::White),
            "black" => Ok(Role::Black),
            other => input(format!("unknown role {other:?}")),
        })
        .collect::<Result<Vec<_>>>()?;
    IncidenceGraph::new(graph, roles)
}

/// Labels keyed by incidence edge, for JSON output.
pub fn labels_by_edge(lab: &[String]) -> BTreeMap<usize, String> {
    lab.iter().cloned().enumerate().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::outcome::run_slocal;
    use crate::graph::LabeledGraph;

    fn strs(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn encoding_sets() {
        let p = LinearizableProblem::maximal_matching();
        assert_eq!(p.sigma.len(), 4);
        assert_eq!(p.black.len(), 6);
        assert_eq!(p.pairs.len(), 5);
        assert!(p.first.contains(PTR) && p.last.contains(PTR));
        assert!(!p.white_ok(&["A", "M"]));
        assert!(p.white_ok(&["Ptr"]));
        assert!(p.white_ok(&["B", "B", "M", "A"]));
        assert!(!p.white_ok(&["M", "M"]));
    }

    #[test]
    fn path_example() {
        // a - b - c with edges e0 = ab, e1 = bc; incidence edges 2e + side.
        let g = Graph::path(3);
        let inc = IncidenceGraph::from_graph(&g);
        // a:[M], b:(M, A), c:[Ptr]; blacks {M,M} and {A,Ptr}.
        let lab = strs(&["M", "M", "A", "Ptr"]);
        let p = LinearizableProblem::maximal_matching();
        assert!(verify_linearizable(&p, &inc, &lab).unwrap().is_ok());
        assert_eq!(decode_to_matching(&inc, &lab).unwrap(), vec![0]);
        assert_eq!(encode_matching(&inc, &[0]).unwrap(), lab);
    }

    #[test]
    fn violations_are_reported() {
        let g = Graph::path(3);
        let inc = IncidenceGraph::from_graph(&g);
        let p = LinearizableProblem::maximal_matching();
        // b reads "A M".
        let lab = strs(&["M", "A", "M", "M"]);
        let v = verify_linearizable(&p, &inc, &lab).unwrap();
        assert_eq!(v.white_violations, vec![1]);
        assert_eq!(v.black_violations, vec![3]);
        assert!(verify_linearizable(&p, &inc, &strs(&["Q", "M", "A", "Ptr"])).is_err());
        assert!(matches!(decode_to_matching(&inc, &lab), Err(crate::Error::Contract(_))));
    }

    #[test]
    fn single_white_and_star() {
        let inc = IncidenceGraph::from_graph(&Graph::path(1));
        assert_eq!(decode_to_matching(&inc, &[]).unwrap(), Vec::<usize>::new());
        let edge = IncidenceGraph::from_graph(&Graph::path(2));
        assert_eq!(encode_matching(&edge, &[0]).unwrap(), strs(&["M", "M"]));
        // Star: center 0, edges e_i = {0, i+1}.
        let star = IncidenceGraph::from_graph(&Graph::star(3));
        let lab = encode_matching(&star, &[0]).unwrap();
        assert_eq!(star.white_string(0, &lab), vec!["M", "A", "A"]);
        assert_eq!(star.white_string(1, &lab), vec!["M"]);
        assert_eq!(star.white_string(2, &lab), vec!["Ptr"]);
        let blacks: Vec<Vec<&str>> = star.blacks.iter().map(|&b| star.white_string(b, &lab)).collect();
        assert_eq!(blacks, vec![vec!["M", "M"], vec!["A", "Ptr"], vec!["A", "Ptr"]]);
    }

    #[test]
    fn c4_alternating() {
        let inc = IncidenceGraph::from_graph(&Graph::cycle(4));
        let lab = encode_matching(&inc, &[0, 2]).unwrap();
        assert_eq!(decode_to_matching(&inc, &lab).unwrap(), vec![0, 2]);
    }

    #[test]
    fn maximality_examples() {
        let p3 = Graph::path(3);
        assert_eq!(is_maximal_matching(&p3, &[0]), None);
        assert_eq!(is_maximal_matching(&Graph::path(2), &[]), Some(MatchingDefect::Augmenting(0)));
        assert_eq!(
            is_maximal_matching(&p3, &[0, 1]),
            Some(MatchingDefect::SharedNode { node: 1, edges: (0, 1) })
        );
        assert!(encode_matching(&IncidenceGraph::from_graph(&p3), &[]).is_err());
    }

    fn greedy(g: &Graph, order: &[NodeId]) -> (Vec<EdgeId>, usize, Labeling) {
        let run = run_slocal(&GreedyMatching, &LabeledGraph::anonymous(g.clone()), order).unwrap();
        (greedy_matching_edges(g, &run.states), run.locality, run.labeling)
    }

    #[test]
    fn greedy_traces() {
        let p3 = Graph::path(3);
        assert_eq!(greedy(&p3, &[0, 1, 2]).0, vec![0]);
        assert_eq!(greedy(&p3, &[1, 0, 2]).0, vec![0]);
        assert_eq!(greedy(&p3, &[1, 0, 2]).1, 1);
        assert_eq!(greedy(&Graph::path(1), &[0]).0, Vec::<EdgeId>::new());
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for i in 0..=p.len() {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn greedy_all_orders_on_path_of_five() {
        let g = Graph::path(5);
        let inc = IncidenceGraph::from_graph(&g);
        for order in permutations(5) {
            let (m, locality, labeling) = greedy(&g, &order);
            assert_eq!(is_maximal_matching(&g, &m), None);
            assert_eq!(m.len(), 2, "order {order:?}");
            assert_eq!(locality, 1);
            let lab = incidence_labels(&g, &labeling).unwrap();
            assert_eq!(decode_to_matching(&inc, &lab).unwrap(), m);
        }
    }

    #[test]
    fn json_round_trips() {
        let p = LinearizableProblem::maximal_matching();
        let text = serde_json::to_string(&LinearizableProblemJson::from_problem(&p)).unwrap();
        let back: LinearizableProblemJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_problem().unwrap(), p);
        let inc = IncidenceGraph::from_graph(&Graph::star(2));
        assert_eq!(incidence_from_json(&incidence_to_json(&inc)).unwrap(), inc);
    }
}
