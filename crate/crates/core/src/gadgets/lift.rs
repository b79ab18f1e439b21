//! The promise problem on proper instances: its verifier, contraction of
//! octopi, the SLOCAL lift of greedy matching and the pullback of outcomes
//! through the port map.

use super::proper::Part;
use super::{PortMap, ProperInstance};
use crate::error::{contract, input, Error, Result};
use crate::graph::{EdgeId, Graph, HalfEdge, LabeledGraph, Labeling, NodeId, ANON};
use crate::linearizable::{
    greedy_matching_edges, GreedyMatching, IncidenceGraph, LinearizableProblem, Role, AFTER, BEFORE, MATCHED, PTR,
};
use crate::outcome::{run_slocal, Outcome};

/// Label of every node outside the port gadgets.
pub const BOTTOM: &str = "⊥";

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PromiseVerdict {
    pub violations: Vec<String>,
}

impl PromiseVerdict {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks a node labeling against the promise problem of `p`: `⊥` outside
/// port gadgets, one label of `Σ` per port gadget, valid ordered strings
/// per octopus and valid multisets per inter-octopus node.
pub fn verify_pi_promise(pi: &ProperInstance, out: &[String], p: &LinearizableProblem) -> Result<PromiseVerdict> {
    let n = pi.graph.node_count();
    if out.len() != n {
        return input(format!("{} labels for {n} nodes", out.len()));
    }
    let mut violations = Vec::new();
    for (v, label) in out.iter().enumerate() {
        let in_port = matches!(pi.part(v), Part::Port { .. });
        if !in_port && label != BOTTOM {
            violations.push(format!("node {v} outside the port gadgets is labeled {label:?}"));
        }
        if in_port && !p.sigma.contains(label) {
            violations.push(format!("port node {v} is labeled {label:?}, outside the alphabet"));
        }
    }
    // Label of each port gadget, when uniform.
    let mut port_label: Vec<Vec<Option<&str>>> = Vec::with_capacity(pi.octopi.len());
    for (o, oct) in pi.octopi.iter().enumerate() {
        let mut labels = Vec::with_capacity(oct.ports.len());
        for (t, port) in oct.ports.iter().enumerate() {
            let first = out[port.gadget.root()].as_str();
            if port.gadget.nodes.iter().all(|&v| out[v] == first) {
                labels.push(Some(first));
            } else {
                violations.push(format!("port {t} (i = {}, j = {}) of octopus {o} is not uniformly labeled", port.i, port.j));
                labels.push(None);
            }
        }
        port_label.push(labels);
    }
    for (o, labels) in port_label.iter().enumerate() {
        if let Some(s) = labels.iter().copied().collect::<Option<Vec<&str>>>() {
            if !p.white_ok(&s) {
                violations.push(format!("octopus {o} has port string {s:?}, which is not allowed"));
            }
        }
    }
    for &b in &pi.inter {
        let labels: Option<Vec<&str>> = pi
            .graph
            .neighbors(b)
            .map(|u| match pi.part(u) {
                Part::Port { octopus, port } => port_label[octopus][port],
                _ => None,
            })
            .collect();
        if let Some(labels) = labels {
            if !p.black_ok(&labels) {
                violations.push(format!("inter-octopus node {b} sees {labels:?}, which is not allowed"));
            }
        }
    }
    Ok(PromiseVerdict { violations })
}

/// The incidence graph obtained by contracting every octopus to a white
/// node and keeping inter-octopus nodes as blacks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contracted {
    /// White `o` is octopus `o`; black `whites + b` is `pi.inter[b]`. Each
    /// white lists its edges in left-to-right port order.
    pub hat: IncidenceGraph,
    /// `port_edges[o][t]` is the edge of port `t` of octopus `o`, if the
    /// port is attached.
    pub port_edges: Vec<Vec<Option<EdgeId>>>,
    /// `(octopus, port)` of every edge.
    pub edge_ports: Vec<(usize, usize)>,
}

/// Contracts each octopus into a single white node. Parallel edges are
/// kept; a port attached to two inter-octopus nodes is an input error.
pub fn contract_octopi(pi: &ProperInstance) -> Result<Contracted> {
    let whites = pi.octopi.len();
    let mut port_edges: Vec<Vec<Option<EdgeId>>> = pi.octopi.iter().map(|o| vec![None; o.ports.len()]).collect();
    let mut edge_ports = Vec::new();
    let mut edges = Vec::new();
    let mut black_adjacency = Vec::with_capacity(pi.inter.len());
    for (bi, &b) in pi.inter.iter().enumerate() {
        let mut row = Vec::new();
        for &e in pi.graph.adjacency(b) {
            let leaf = pi.graph.other(e, b);
            let Part::Port { octopus, port } = pi.part(leaf) else {
                return contract(format!("inter-octopus node {b} touches node {leaf} outside the port gadgets"));
            };
            if port_edges[octopus][port].is_some() {
                return input(format!("port {port} of octopus {octopus} is attached to more than one inter-octopus node"));
            }
            port_edges[octopus][port] = Some(edges.len());
            row.push(edges.len());
            edge_ports.push((octopus, port));
            edges.push((octopus, whites + bi));
        }
        black_adjacency.push(row);
    }
    let mut adjacency: Vec<Vec<EdgeId>> = port_edges.iter().map(|ports| ports.iter().flatten().copied().collect()).collect();
    adjacency.extend(black_adjacency);
    let graph = Graph::with_adjacency(whites + pi.inter.len(), true, edges, adjacency)?;
    let mut roles = vec![Role::White; whites];
    roles.extend(std::iter::repeat_n(Role::Black, pi.inter.len()));
    Ok(Contracted { hat: IncidenceGraph::new(graph, roles)?, port_edges, edge_ports })
}

/// Output of the lifted greedy matching.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftRun {
    /// One label per node of the proper instance.
    pub labels: Vec<String>,
    /// Largest radius greedy queried on the contracted graph.
    pub locality_hat: usize,
    /// Largest distance, in the proper instance, from an octopus's head
    /// root to a node of an octopus it had to read.
    pub locality_g: usize,
    /// `4 (k + x)` for the largest port height `k` and head height `x`.
    pub locality_bound: usize,
}

/// Runs greedy maximal matching on the contracted graph in the given order
/// of octopi and writes each port's label on every node of the port
/// gadget: `B* M A*` around the matched port, `Ptr` for unmatched octopi,
/// `⊥` elsewhere.
///
/// Every inter-octopus node must join two distinct octopi.
pub fn lift_slocal_algorithm(pi: &ProperInstance, order: &[usize]) -> Result<LiftRun> {
    let c = contract_octopi(pi)?;
    let whites = pi.octopi.len();
    let hat = &c.hat.graph;
    // One matching edge per black, between its two octopi.
    let mut edges = Vec::with_capacity(pi.inter.len());
    for (bi, &b) in c.hat.blacks.iter().enumerate() {
        let members: Vec<NodeId> = hat.neighbors(b).collect();
        match members[..] {
            [u, v] if u != v => edges.push((u, v)),
            _ => {
                return Err(Error::Precondition(format!(
                    "inter-octopus node {} must join two distinct octopi, joins {members:?}",
                    pi.inter[bi]
                )))
            }
        }
    }
    let adjacency: Vec<Vec<EdgeId>> =
        (0..whites).map(|v| hat.adjacency(v).iter().map(|&e| hat.other(e, v) - whites).collect()).collect();
    let w = Graph::with_adjacency(whites, true, edges, adjacency)?;
    let run = run_slocal(&GreedyMatching, &LabeledGraph::anonymous(w.clone()), order)?;
    let matched = greedy_matching_edges(&w, &run.states);

    let mut labels = vec![BOTTOM.to_string(); pi.graph.node_count()];
    for (o, oct) in pi.octopi.iter().enumerate() {
        let pos = run.states[o].filter(|e| matched.contains(e)).map(|e| {
            c.port_edges[o].iter().position(|&x| x.map(|he| hat.other(he, o) - whites) == Some(e)).expect("matched edge is a port")
        });
        for (t, port) in oct.ports.iter().enumerate() {
            let label = match pos {
                None => PTR,
                Some(p) if t < p => BEFORE,
                Some(p) if t == p => MATCHED,
                Some(_) => AFTER,
            };
            if let Some(he) = c.port_edges[o][t] {
                let e = hat.other(he, o) - whites;
                let greedy = run.labeling.half_edge(&w, HalfEdge { node: o, edge: e });
                if greedy != label {
                    return contract(format!("greedy labeled port {t} of octopus {o} {greedy:?}, expected {label:?}"));
                }
            }
            for &v in &port.gadget.nodes {
                labels[v] = label.to_string();
            }
        }
    }

    let mut locality_g = 0;
    for (o, oct) in pi.octopi.iter().enumerate() {
        let reach = w.bfs([o]);
        let read: Vec<usize> = (0..whites).filter(|&u| matches!(reach[u], Some(d) if d <= run.locality)).collect();
        let dist = pi.graph.bfs([oct.head.root()]);
        for &u in &read {
            for v in pi.octopi[u].nodes() {
                let d = dist[v].ok_or_else(|| Error::Contract("octopus read across components".into()))?;
                locality_g = locality_g.max(d);
            }
        }
    }
    Ok(LiftRun {
        labels,
        locality_hat: run.locality,
        locality_g,
        locality_bound: 4 * (pi.port_height_max() + pi.x_max()),
    })
}

/// Edge labels of the source incidence graph: edge `e` takes the label of
/// the port root standing for it.
pub fn pullback_labeling(map: &PortMap, source: &IncidenceGraph, out: &[String]) -> Result<Vec<String>> {
    if map.roots.len() != source.graph.edge_count() {
        return input(format!("port map has {} roots for {} edges", map.roots.len(), source.graph.edge_count()));
    }
    map.roots
        .iter()
        .map(|&r| out.get(r).cloned().ok_or_else(|| Error::Input(format!("no label for port root {r}"))))
        .collect()
}

/// Pulls every support entry back through the port map; probabilities are
/// kept and entries with equal images merge. The result lives on the
/// anonymous source graph, with both half-edges of an edge carrying its
/// label.
pub fn pullback_outcome(o: &Outcome, map: &PortMap, source: &IncidenceGraph) -> Result<Outcome> {
    let target = LabeledGraph::anonymous(source.graph.clone());
    o.map(target, |l| {
        let lab = pullback_labeling(map, source, &l.nodes)?;
        Ok(Labeling {
            nodes: vec![ANON.to_string(); source.graph.node_count()],
            half_edges: lab.into_iter().map(|x| [x.clone(), x]).collect(),
        })
    })
}
