//! Dequantization by expectation and the view-driven LOCAL algorithm that
//! outputs expected marginals.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{check_feasible, DistLp, LpPoint, Owner};
use crate::error::{contract, input, Result};
use crate::graph::{extract_view, views_isomorphic, EdgeId, Graph, HalfEdge, LabeledGraph, Labeling, NodeId, View, ANON};
use crate::outcome::{LocalAlgorithm, NodeOutput, Outcome};
use crate::rational::{self, zero};

/// Produces an outcome for any input network of a family.
pub type Oracle = Arc<dyn Fn(&LabeledGraph) -> Result<Outcome> + Send + Sync>;

/// Embeds a radius-`T` view into some member of a graph family.
pub type Completion = Arc<dyn Fn(&View) -> Result<Completed> + Send + Sync>;

/// A completed network: `node` plays the view's anchor, and `ports[i]` is
/// the edge of `graph` carrying the anchor's `i`-th visible half-edge.
#[derive(Clone, Debug)]
pub struct Completed {
    pub graph: LabeledGraph,
    pub node: NodeId,
    pub ports: Vec<EdgeId>,
}

fn check_one_variable_per_owner(p: &DistLp) -> Result<()> {
    let mut seen = BTreeMap::new();
    for v in p.variables() {
        if let Some(other) = seen.insert(v.owner, &v.name) {
            return input(format!("variables {other} and {} share an owner; labels cannot carry both", v.name));
        }
    }
    Ok(())
}

/// Reads an LP point off an output labeling: node variables from node
/// labels, edge variables from the two (equal) half-edge labels.
pub fn point_from_labeling(p: &DistLp, l: &Labeling) -> Result<LpPoint> {
    check_one_variable_per_owner(p)?;
    l.check_domain(&p.graph)?;
    let mut out = BTreeMap::new();
    for v in p.variables() {
        let value = match v.owner {
            Owner::Node(u) => rational::parse(&l.nodes[u])?,
            Owner::Edge(e) => {
                let [a, b] = &l.half_edges[e];
                if a != b {
                    return input(format!("half-edges of edge {e} disagree: {a:?} vs {b:?}"));
                }
                rational::parse(a)?
            }
        };
        out.insert(v.name.clone(), value);
    }
    Ok(LpPoint(out))
}

/// Writes a point as a labeling; positions owning no variable get [`ANON`].
pub fn labeling_from_point(p: &DistLp, x: &LpPoint) -> Result<Labeling> {
    check_one_variable_per_owner(p)?;
    let mut l = Labeling::uniform(&p.graph, ANON, ANON);
    for v in p.variables() {
        let Some(value) = x.get(&v.name) else {
            return input(format!("point has no value for variable {}", v.name));
        };
        let text = rational::format(value);
        match v.owner {
            Owner::Node(u) => l.nodes[u] = text,
            Owner::Edge(e) => l.half_edges[e] = [text.clone(), text],
        }
    }
    Ok(l)
}

/// Coordinatewise expectation of an outcome whose support points are all
/// feasible for `p`.
pub fn dequantize(p: &DistLp, o: &Outcome) -> Result<LpPoint> {
    if o.input().graph != p.graph {
        return input("outcome and LP are over different graphs");
    }
    for (i, (l, _)) in o.support().enumerate() {
        let x = point_from_labeling(p, l)?;
        let verdict = check_feasible(p, &x)?;
        if !verdict.is_ok() {
            return contract(format!(
                "support entry {i} is infeasible (rows {:?}, negative {:?})",
                verdict.violated_rows, verdict.negative
            ));
        }
    }
    // Every coordinate read below parsed above; other labels contribute 0.
    let e = o.expectation(|label| Ok(rational::parse(label).unwrap_or_else(|_| zero())))?;
    Ok(LpPoint(
        p.variables()
            .iter()
            .map(|v| {
                let value = match v.owner {
                    Owner::Node(u) => e.nodes[u].clone(),
                    Owner::Edge(edge) => e.half_edges[edge][0].clone(),
                };
                (v.name.clone(), value)
            })
            .collect(),
    ))
}

/// A deterministic LOCAL algorithm of locality `t`: complete the view to a
/// family member, run the oracle there and output the expected labels of
/// the anchor's image.
pub fn local_expectation_algorithm(
    name: impl Into<String>,
    oracle: Oracle,
    t: usize,
    completion: Completion,
) -> LocalAlgorithm {
    LocalAlgorithm::deterministic(name, t, move |view| {
        let c = completion(view)?;
        c.graph.graph.check_node(c.node).map_err(|_| crate::Error::Contract("completion node out of range".into()))?;
        let anchor_ports = &view.ports[view.anchor()];
        if c.ports.len() != anchor_ports.len() || c.ports.iter().any(|&e| !c.graph.graph.adjacency(c.node).contains(&e)) {
            return contract("completion ports do not match the anchor's half-edges");
        }
        let embedded = extract_view(&c.graph, &[c.node], t)?;
        if views_isomorphic(view, &embedded).is_none() {
            return contract("completion does not reproduce the view");
        }
        let o = oracle(&c.graph)?;
        if o.input() != &c.graph {
            return contract("oracle answered for a different network");
        }
        let r = o.restrict(&[c.node])?;
        let mut node_value = Some(zero());
        let mut port_values = vec![zero(); c.ports.len()];
        for (l, p) in &r.support {
            node_value = match (node_value, rational::parse(&l.nodes[0])) {
                (Some(acc), Ok(v)) => Some(acc + v * p),
                _ => None,
            };
            for (i, &e) in c.ports.iter().enumerate() {
                let pos = r.half_edges.iter().position(|h| h.edge == e).expect("port is incident to the node");
                let v = rational::parse(&l.half_edges[pos])
                    .map_err(|_| crate::Error::Contract(format!("oracle label {:?} is not a rational", l.half_edges[pos])))?;
                port_values[i] += v * p;
            }
        }
        let label = node_value.map_or_else(|| ANON.to_string(), |v| rational::format(&v));
        Ok(NodeOutput::new(label, port_values.iter().map(rational::format).collect()))
    })
}

/// Completes every view to the given network itself.
pub fn whole_graph_completion(g: LabeledGraph) -> Completion {
    Arc::new(move |view: &View| {
        let a = view.anchor();
        Ok(Completed {
            graph: g.clone(),
            node: view.origin_nodes[a],
            ports: view.ports[a].iter().map(|p| p.source_edge).collect(),
        })
    })
}

/// Completes a path-shaped radius-`t` view around a degree-2 anchor to the
/// cycle on `m >= max(3, 2t + 1)` nodes, copying the view's labels.
pub fn cycle_completion(m: usize, t: usize) -> Result<Completion> {
    if m < 3 || m < 2 * t + 1 {
        return input(format!("cycle length {m} cannot hold a radius-{t} path view"));
    }
    Ok(Arc::new(move |view: &View| complete_cycle(view, m, t)))
}

fn complete_cycle(view: &View, m: usize, t: usize) -> Result<Completed> {
    let vg = &view.graph;
    let a = view.anchor();
    if view.ports[a].len() != 2 {
        return contract("cycle completion needs an anchor of degree 2");
    }
    let graph = Graph::cycle(m);
    let mut labels = Labeling::uniform(&graph, ANON, ANON);
    labels.nodes[0] = vg.node_label(a).to_string();
    let mut visited = vec![a];
    for side in 0..2 {
        let port = &view.ports[a][side];
        // Cycle edge leaving position 0 on this side, and the position step.
        let first_edge = if side == 0 { 0 } else { m - 1 };
        if t == 0 {
            labels.set_half_edge(&graph, HalfEdge { node: 0, edge: first_edge }, port.label.clone());
            continue;
        }
        let position = |j: usize| if side == 0 { j } else { (m - j) % m };
        let cycle_edge = |j: usize| if side == 0 { j - 1 } else { m - j };
        let mut cur = a;
        let mut via = port.edge.expect("anchor edges are visible for t >= 1");
        for j in 1..=t {
            let next = vg.graph.other(via, cur);
            if visited.contains(&next) {
                return contract("view is not a path centered at the anchor");
            }
            visited.push(next);
            let e = cycle_edge(j);
            labels.set_half_edge(&graph, HalfEdge { node: position(j - 1), edge: e }, vg.half_edge_label(cur, via));
            labels.set_half_edge(&graph, HalfEdge { node: position(j), edge: e }, vg.half_edge_label(next, via));
            labels.nodes[position(j)] = vg.node_label(next).to_string();
            if j < t {
                let onward: Vec<EdgeId> =
                    vg.graph.adjacency(next).iter().copied().filter(|&f| vg.graph.other(f, next) != cur).collect();
                match onward.as_slice() {
                    [f] => via = *f,
                    _ => return contract("view is not a path centered at the anchor"),
                }
            }
            cur = next;
        }
    }
    if visited.len() != view.node_count() || vg.graph.edge_count() != 2 * t {
        return contract("view is not a path centered at the anchor");
    }
    let mut node_alphabet = vg.node_alphabet.clone();
    node_alphabet.insert(ANON.to_string());
    let mut half_edge_alphabet = vg.half_edge_alphabet.clone();
    half_edge_alphabet.insert(ANON.to_string());
    Ok(Completed {
        graph: LabeledGraph::with_alphabets(graph, labels, node_alphabet, half_edge_alphabet)?,
        node: 0,
        ports: vec![0, m - 1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{approximation_ratio, build_fractional_matching_lp, edge_var, Approximation};
    use crate::outcome::{run_local, run_rand_local, SeedMode};
    use crate::rational::{int, one, ratio};

    fn k3_matchings() -> (DistLp, Outcome) {
        let g = Graph::complete(3);
        let lp = build_fractional_matching_lp(&g).unwrap();
        let input_graph = LabeledGraph::anonymous(g);
        let labelings = (0..3)
            .map(|m| {
                let x = LpPoint((0..3).map(|e| (edge_var(e), if e == m { one() } else { zero() })).collect());
                labeling_from_point(&lp, &x).unwrap()
            })
            .collect();
        (lp, Outcome::uniform(input_graph, labelings).unwrap())
    }

    #[test]
    fn k3_uniform_matchings_dequantize_to_thirds() {
        let (lp, o) = k3_matchings();
        let x = dequantize(&lp, &o).unwrap();
        assert!(x.0.values().all(|v| *v == ratio(1, 3)));
        assert!(check_feasible(&lp, &x).unwrap().is_ok());
        assert_eq!(lp.objective_value(&x).unwrap(), int(1));
        assert_eq!(approximation_ratio(&lp, &x).unwrap(), Approximation::Ratio(ratio(3, 2)));
    }

    #[test]
    fn deterministic_and_optimal_mixtures() {
        let g = Graph::cycle(4);
        let lp = build_fractional_matching_lp(&g).unwrap();
        let pt = |vals: [i64; 4]| LpPoint((0..4).map(|e| (edge_var(e), int(vals[e]))).collect());
        let (a, b) = (pt([1, 0, 1, 0]), pt([0, 1, 0, 1]));
        let input_graph = LabeledGraph::anonymous(g);
        let det = Outcome::deterministic(input_graph.clone(), labeling_from_point(&lp, &a).unwrap()).unwrap();
        assert_eq!(dequantize(&lp, &det).unwrap(), a);
        for q in [zero(), ratio(1, 4), ratio(1, 2)] {
            let o = Outcome::new(
                input_graph.clone(),
                [(labeling_from_point(&lp, &a).unwrap(), q.clone()), (labeling_from_point(&lp, &b).unwrap(), one() - q)],
            )
            .unwrap();
            let x = dequantize(&lp, &o).unwrap();
            assert_eq!(lp.objective_value(&x).unwrap(), int(2));
            assert_eq!(approximation_ratio(&lp, &x).unwrap(), Approximation::Ratio(one()));
        }
    }

    #[test]
    fn infeasible_support_is_a_contract_error() {
        let g = Graph::path(3);
        let lp = build_fractional_matching_lp(&g).unwrap();
        let x = LpPoint([(edge_var(0), one()), (edge_var(1), one())].into_iter().collect());
        let o = Outcome::deterministic(LabeledGraph::anonymous(g), labeling_from_point(&lp, &x).unwrap()).unwrap();
        assert!(matches!(dequantize(&lp, &o), Err(crate::Error::Contract(_))));
    }

    fn k3_oracle() -> Oracle {
        Arc::new(|g: &LabeledGraph| {
            let lp = build_fractional_matching_lp(&g.graph)?;
            let labelings = (0..g.graph.edge_count())
                .map(|m| {
                    let x = LpPoint(
                        (0..g.graph.edge_count()).map(|e| (edge_var(e), if e == m { one() } else { zero() })).collect(),
                    );
                    labeling_from_point(&lp, &x)
                })
                .collect::<Result<Vec<_>>>()?;
            Outcome::uniform(g.clone(), labelings)
        })
    }

    #[test]
    fn whole_graph_completion_on_k3() {
        let g = LabeledGraph::anonymous(Graph::complete(3));
        let alg = local_expectation_algorithm("expect", k3_oracle(), 1, whole_graph_completion(g.clone()));
        let l = run_local(&alg, &g).unwrap();
        assert!(l.half_edges.iter().flatten().all(|x| x == "1/3"));
    }

    /// Each edge carries 1/2 when both endpoint seeds agree.
    fn agreeing_seeds() -> LocalAlgorithm {
        LocalAlgorithm::randomized("agree", 1, vec!["0".into(), "1".into()], |view, seeds| {
            let me = view.anchor();
            let ports = view.ports[me]
                .iter()
                .map(|p| {
                    let other = view.graph.graph.other(p.edge.expect("radius 1"), me);
                    if seeds[me] == seeds[other] { "1/2" } else { "0" }.to_string()
                })
                .collect();
            Ok(NodeOutput::new(ANON, ports))
        })
    }

    #[test]
    fn cycle_completions_agree() {
        let oracle: Oracle = Arc::new(|g: &LabeledGraph| run_rand_local(&agreeing_seeds(), g, SeedMode::Exact));
        let g = LabeledGraph::anonymous(Graph::cycle(6));
        let small = local_expectation_algorithm("c5", oracle.clone(), 1, cycle_completion(5, 1).unwrap());
        let large = local_expectation_algorithm("c9", oracle, 1, cycle_completion(9, 1).unwrap());
        let a = run_local(&small, &g).unwrap();
        let b = run_local(&large, &g).unwrap();
        assert_eq!(a, b);
        assert!(a.half_edges.iter().flatten().all(|x| x == "1/4"));
    }

    #[test]
    fn cycle_completion_rejects_non_paths() {
        // Radius 2 around a node of C4 sees the whole cycle.
        let g = LabeledGraph::anonymous(Graph::cycle(4));
        let view = extract_view(&g, &[0], 2).unwrap();
        assert!(cycle_completion(5, 2).unwrap()(&view).is_err());
        assert!(cycle_completion(4, 2).is_err());
    }
}
