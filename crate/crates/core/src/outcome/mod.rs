//! Explicit finite outcome distributions over output labelings.

mod nonsignal;
mod sim;

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::graph::{GraphJson, HalfEdge, LabeledGraph, Labeling, NodeId};
use crate::rational::{self, one, zero, Rational};

pub use nonsignal::{verify_non_signaling, NonSignalingVerdict, DEFAULT_ISOMORPHISM_CAP};
pub use sim::{
    run_local, run_rand_local, run_slocal, LocalAlgorithm, NodeOutput, Rule, SeedMode, SlocalAlgorithm,
    SlocalRun, StepContext, EXACT_SEED_LIMIT,
};

/// A probability distribution over output labelings of one input network.
///
/// Duplicate labelings are merged and zero-probability entries dropped, so
/// two outcomes are equal as distributions iff their supports are equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    input: LabeledGraph,
    support: BTreeMap<Labeling, Rational>,
}

impl Outcome {
    pub fn new(input_graph: LabeledGraph, entries: impl IntoIterator<Item = (Labeling, Rational)>) -> Result<Self> {
        let mut support: BTreeMap<Labeling, Rational> = BTreeMap::new();
        let mut total = zero();
        for (labeling, p) in entries {
            labeling.check_domain(&input_graph.graph)?;
            if !rational::is_nonnegative(&p) {
                return input(format!("negative probability {}", rational::format(&p)));
            }
            total += &p;
            *support.entry(labeling).or_insert_with(zero) += p;
        }
        if total != one() {
            return input(format!("probabilities sum to {}, not 1", rational::format(&total)));
        }
        support.retain(|_, p| !p.is_zero());
        Ok(Outcome { input: input_graph, support })
    }

    pub fn deterministic(input_graph: LabeledGraph, labeling: Labeling) -> Result<Self> {
        Self::new(input_graph, [(labeling, one())])
    }

    /// Uniform over `labelings`, counting repeats with multiplicity.
    pub fn uniform(input_graph: LabeledGraph, labelings: Vec<Labeling>) -> Result<Self> {
        if labelings.is_empty() {
            return input("uniform outcome over an empty list");
        }
        let p = rational::ratio(1, labelings.len() as i64);
        Self::new(input_graph, labelings.into_iter().map(|l| (l, p.clone())))
    }

    pub fn input(&self) -> &LabeledGraph {
        &self.input
    }

    pub fn support(&self) -> impl Iterator<Item = (&Labeling, &Rational)> {
        self.support.iter()
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn probability_of(&self, labeling: &Labeling) -> Rational {
        self.support.get(labeling).cloned().unwrap_or_else(zero)
    }

    /// Marginal on `nodes` and the half-edges incident to them.
    pub fn restrict(&self, nodes: &[NodeId]) -> Result<RestrictedOutcome> {
        let g = &self.input.graph;
        for &v in nodes {
            g.check_node(v)?;
        }
        let scope: Vec<NodeId> = nodes.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let half_edges: Vec<HalfEdge> =
            scope.iter().flat_map(|&v| g.adjacency(v).iter().map(move |&edge| HalfEdge { node: v, edge })).collect();
        let mut support: BTreeMap<PartialLabeling, Rational> = BTreeMap::new();
        for (l, p) in &self.support {
            let partial = PartialLabeling {
                nodes: scope.iter().map(|&v| l.nodes[v].clone()).collect(),
                half_edges: half_edges.iter().map(|&h| l.half_edge(g, h).to_string()).collect(),
            };
            *support.entry(partial).or_insert_with(zero) += p;
        }
        Ok(RestrictedOutcome { nodes: scope, half_edges, support })
    }

    /// Total probability of labelings accepted by `verifier`.
    pub fn success_probability(&self, mut verifier: impl FnMut(&Labeling) -> bool) -> Rational {
        self.support.iter().filter(|(l, _)| verifier(l)).map(|(_, p)| p.clone()).sum()
    }

    /// Like [`Self::success_probability`] for fallible verifiers.
    pub fn try_success_probability(&self, mut verifier: impl FnMut(&Labeling) -> Result<bool>) -> Result<Rational> {
        let mut total = zero();
        for (l, p) in &self.support {
            if verifier(l)? {
                total += p;
            }
        }
        Ok(total)
    }

    /// Coordinatewise expected value of `value` over the support.
    pub fn expectation(&self, mut value: impl FnMut(&str) -> Result<Rational>) -> Result<Expectation> {
        let g = &self.input.graph;
        let mut out = Expectation {
            nodes: vec![zero(); g.node_count()],
            half_edges: vec![[zero(), zero()]; g.edge_count()],
        };
        for (l, p) in &self.support {
            for (acc, label) in out.nodes.iter_mut().zip(&l.nodes) {
                *acc += value(label)? * p;
            }
            for (acc, labels) in out.half_edges.iter_mut().zip(&l.half_edges) {
                for s in 0..2 {
                    acc[s] += value(&labels[s])? * p;
                }
            }
        }
        Ok(out)
    }

    /// Maps every labeling through `f`, merging images.
    pub fn map(&self, new_input: LabeledGraph, mut f: impl FnMut(&Labeling) -> Result<Labeling>) -> Result<Outcome> {
        let entries = self.support.iter().map(|(l, p)| Ok((f(l)?, p.clone()))).collect::<Result<Vec<_>>>()?;
        Outcome::new(new_input, entries)
    }

    /// Convex combination of outcomes on the same input.
    pub fn mixture(parts: &[(Outcome, Rational)]) -> Result<Outcome> {
        let Some((first, _)) = parts.first() else {
            return input("mixture of no outcomes");
        };
        if parts.iter().any(|(o, _)| o.input != first.input) {
            return input("mixture components have different inputs");
        }
        let entries = parts.iter().flat_map(|(o, w)| o.support.iter().map(move |(l, p)| (l.clone(), p * w)));
        Outcome::new(first.input.clone(), entries)
    }
}

/// Coordinatewise expectation, indexed like a [`Labeling`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expectation {
    pub nodes: Vec<Rational>,
    pub half_edges: Vec<[Rational; 2]>,
}

/// Labels on a restricted scope, aligned with [`RestrictedOutcome::nodes`]
/// and [`RestrictedOutcome::half_edges`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartialLabeling {
    pub nodes: Vec<String>,
    pub half_edges: Vec<String>,
}

/// A marginal distribution on a node set `S` and the half-edges at `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictedOutcome {
    /// Scope nodes, ascending.
    pub nodes: Vec<NodeId>,
    /// Scope half-edges, grouped by node in adjacency order.
    pub half_edges: Vec<HalfEdge>,
    pub support: BTreeMap<PartialLabeling, Rational>,
}

impl RestrictedOutcome {
    /// Further marginal onto `nodes`, which must lie in the scope.
    pub fn restrict(&self, nodes: &[NodeId]) -> Result<RestrictedOutcome> {
        let keep: BTreeSet<NodeId> = nodes.iter().copied().collect();
        if let Some(v) = keep.iter().find(|v| self.nodes.binary_search(v).is_err()) {
            return input(format!("node {v} is outside the restricted scope"));
        }
        let node_idx: Vec<usize> = (0..self.nodes.len()).filter(|&i| keep.contains(&self.nodes[i])).collect();
        let half_idx: Vec<usize> =
            (0..self.half_edges.len()).filter(|&i| keep.contains(&self.half_edges[i].node)).collect();
        let mut support: BTreeMap<PartialLabeling, Rational> = BTreeMap::new();
        for (l, p) in &self.support {
            let partial = PartialLabeling {
                nodes: node_idx.iter().map(|&i| l.nodes[i].clone()).collect(),
                half_edges: half_idx.iter().map(|&i| l.half_edges[i].clone()).collect(),
            };
            *support.entry(partial).or_insert_with(zero) += p;
        }
        Ok(RestrictedOutcome {
            nodes: node_idx.iter().map(|&i| self.nodes[i]).collect(),
            half_edges: half_idx.iter().map(|&i| self.half_edges[i]).collect(),
            support,
        })
    }

    pub fn total(&self) -> Rational {
        self.support.values().sum()
    }

    /// Expected value per scope node and per scope half-edge.
    pub fn expectation(&self, mut value: impl FnMut(&str) -> Result<Rational>) -> Result<(Vec<Rational>, Vec<Rational>)> {
        let mut nodes = vec![zero(); self.nodes.len()];
        let mut halves = vec![zero(); self.half_edges.len()];
        for (l, p) in &self.support {
            for (acc, label) in nodes.iter_mut().zip(&l.nodes) {
                *acc += value(label)? * p;
            }
            for (acc, label) in halves.iter_mut().zip(&l.half_edges) {
                *acc += value(label)? * p;
            }
        }
        Ok((nodes, halves))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LabelsJson {
    pub nodes: Vec<String>,
    #[serde(default)]
    pub half_edges: BTreeMap<String, String>,
}

impl LabelsJson {
    pub fn from_labeling(g: &LabeledGraph, l: &Labeling) -> Self {
        LabelsJson {
            nodes: l.nodes.clone(),
            half_edges: g
                .graph
                .half_edges()
                .map(|h| (format!("{}:{}", h.node, h.edge), l.half_edge(&g.graph, h).to_string()))
                .collect(),
        }
    }

    /// Every half-edge must be present.
    pub fn to_labeling(&self, g: &LabeledGraph) -> Result<Labeling> {
        let graph = &g.graph;
        if self.nodes.len() != graph.node_count() {
            return input(format!("{} node labels for {} nodes", self.nodes.len(), graph.node_count()));
        }
        let mut l = Labeling { nodes: self.nodes.clone(), half_edges: vec![Default::default(); graph.edge_count()] };
        for h in graph.half_edges() {
            let key = format!("{}:{}", h.node, h.edge);
            match self.half_edges.get(&key) {
                Some(label) => l.set_half_edge(graph, h, label.clone()),
                None => return input(format!("missing label for half-edge {key}")),
            }
        }
        if self.half_edges.len() != 2 * graph.edge_count() {
            return input("labels name half-edges that do not exist");
        }
        Ok(l)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SupportEntryJson {
    pub p: String,
    pub labels: LabelsJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OutcomeJson {
    pub graph: GraphJson,
    pub support: Vec<SupportEntryJson>,
}

impl OutcomeJson {
    pub fn from_outcome(o: &Outcome) -> Self {
        OutcomeJson {
            graph: GraphJson::from_labeled(&o.input),
            support: o
                .support
                .iter()
                .map(|(l, p)| SupportEntryJson { p: rational::format(p), labels: LabelsJson::from_labeling(&o.input, l) })
                .collect(),
        }
    }

    pub fn to_outcome(&self) -> Result<Outcome> {
        let g = self.graph.to_labeled()?;
        let entries = self
            .support
            .iter()
            .map(|e| Ok((e.labels.to_labeling(&g)?, rational::parse(&e.p)?)))
            .collect::<Result<Vec<_>>>()?;
        Outcome::new(g, entries)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::rational::ratio;

    /// The three single-edge matchings of K3, edge labels "M" / "U".
    pub(crate) fn k3_single_edge_matchings() -> Outcome {
        let g = LabeledGraph::anonymous(Graph::complete(3));
        let labelings = (0..3)
            .map(|m| Labeling {
                nodes: vec!["_".into(); 3],
                half_edges: (0..3)
                    .map(|e| if e == m { ["M".into(), "M".into()] } else { ["U".into(), "U".into()] })
                    .collect(),
            })
            .collect();
        Outcome::uniform(g, labelings).unwrap()
    }

    #[test]
    fn probabilities_must_sum_to_one() {
        let g = LabeledGraph::anonymous(Graph::path(1));
        let l = Labeling { nodes: vec!["a".into()], half_edges: vec![] };
        assert!(Outcome::new(g.clone(), [(l.clone(), ratio(1, 2))]).is_err());
        assert!(Outcome::new(g.clone(), [(l.clone(), ratio(3, 2)), (l.clone(), ratio(-1, 2))]).is_err());
        let o = Outcome::new(g, [(l.clone(), ratio(1, 2)), (l.clone(), ratio(1, 2))]).unwrap();
        assert_eq!(o.len(), 1);
        assert_eq!(o.probability_of(&l), one());
    }

    #[test]
    fn restrict_merges_agreeing_labelings() {
        let g = LabeledGraph::anonymous(Graph::path(2));
        let a = Labeling { nodes: vec!["x".into(), "0".into()], half_edges: vec![["h".into(), "h".into()]] };
        let b = Labeling { nodes: vec!["x".into(), "1".into()], half_edges: vec![["h".into(), "k".into()]] };
        let o = Outcome::uniform(g, vec![a, b]).unwrap();
        let r = o.restrict(&[0]).unwrap();
        assert_eq!(r.support.len(), 1);
        assert_eq!(r.total(), one());
        assert_eq!(o.restrict(&[1]).unwrap().support.len(), 2);
    }

    #[test]
    fn restrict_k3_single_node() {
        // Node 0 lies on edges 0 = {0,1} and 1 = {0,2}; its marginal has
        // three outcomes of weight 1/3 each.
        let o = k3_single_edge_matchings();
        let r = o.restrict(&[0]).unwrap();
        assert_eq!(r.half_edges.len(), 2);
        let got: Vec<(Vec<String>, Rational)> =
            r.support.iter().map(|(l, p)| (l.half_edges.clone(), p.clone())).collect();
        let expected = vec![
            (vec!["M".to_string(), "U".to_string()], ratio(1, 3)),
            (vec!["U".to_string(), "M".to_string()], ratio(1, 3)),
            (vec!["U".to_string(), "U".to_string()], ratio(1, 3)),
        ];
        assert_eq!(got, expected);
    }

    #[test]
    fn success_probability_examples() {
        let o = k3_single_edge_matchings();
        assert_eq!(o.success_probability(|_| true), one());
        assert_eq!(o.success_probability(|_| false), zero());
        assert_eq!(o.success_probability(|l| l.half_edges[0][0] == "M"), ratio(1, 3));
        let g = LabeledGraph::anonymous(Graph::path(1));
        let mk = |s: &str| Labeling { nodes: vec![s.into()], half_edges: vec![] };
        let two = Outcome::uniform(g, vec![mk("ok"), mk("bad")]).unwrap();
        assert_eq!(two.success_probability(|l| l.nodes[0] == "ok"), ratio(1, 2));
    }

    #[test]
    fn expectation_examples() {
        let o = k3_single_edge_matchings();
        let e = o.expectation(|l| Ok(if l == "M" { one() } else { zero() })).unwrap();
        for pair in &e.half_edges {
            assert_eq!(pair, &[ratio(1, 3), ratio(1, 3)]);
        }
        let g = LabeledGraph::anonymous(Graph::path(1));
        let mk = |s: &str| Labeling { nodes: vec![s.into()], half_edges: vec![] };
        let coin = Outcome::uniform(g, vec![mk("0"), mk("1")]).unwrap();
        assert_eq!(coin.expectation(rational::parse).unwrap().nodes, vec![ratio(1, 2)]);
    }

    #[test]
    fn json_round_trip() {
        let o = k3_single_edge_matchings();
        let text = serde_json::to_string(&OutcomeJson::from_outcome(&o)).unwrap();
        let back: OutcomeJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_outcome().unwrap(), o);
    }
}
