//! LOCAL, randomized LOCAL and SLOCAL simulators.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Outcome;
use crate::error::{contract, input, Result};
use crate::graph::{extract_view, HalfEdge, LabeledGraph, Labeling, NodeId, View};
use crate::rational::ratio;

/// Refuse exact enumeration beyond this many seed assignments.
pub const EXACT_SEED_LIMIT: u64 = 1 << 24;

/// Output of one node: its own label and one label per incident half-edge,
/// in the node's adjacency order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NodeOutput {
    pub label: String,
    pub ports: Vec<String>,
}

impl NodeOutput {
    pub fn new(label: impl Into<String>, ports: Vec<String>) -> Self {
        NodeOutput { label: label.into(), ports }
    }

    /// Same label on the node and every port of the view's anchor.
    pub fn uniform(view: &View, label: &str, port: &str) -> Self {
        NodeOutput { label: label.to_string(), ports: vec![port.to_string(); view.ports[view.anchor()].len()] }
    }
}

/// `(view, seeds)` to output. `seeds[i]` is the seed of view node `i`.
pub type Rule = Arc<dyn Fn(&View, Option<&[String]>) -> Result<NodeOutput> + Send + Sync>;

/// A `T`-round LOCAL algorithm given as a function of radius-`T` views.
#[derive(Clone)]
pub struct LocalAlgorithm {
    pub name: String,
    pub locality: usize,
    /// Empty for deterministic algorithms.
    pub seed_alphabet: Vec<String>,
    pub node_alphabet: Option<BTreeSet<String>>,
    pub half_edge_alphabet: Option<BTreeSet<String>>,
    rule: Rule,
}

impl fmt::Debug for LocalAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LocalAlgorithm")
            .field("name", &self.name)
            .field("locality", &self.locality)
            .field("seed_alphabet", &self.seed_alphabet)
            .finish_non_exhaustive()
    }
}

impl LocalAlgorithm {
    pub fn deterministic(
        name: impl Into<String>,
        locality: usize,
        rule: impl Fn(&View) -> Result<NodeOutput> + Send + Sync + 'static,
    ) -> Self {
        LocalAlgorithm {
            name: name.into(),
            locality,
            seed_alphabet: Vec::new(),
            node_alphabet: None,
            half_edge_alphabet: None,
            rule: Arc::new(move |view, _| rule(view)),
        }
    }

    pub fn randomized(
        name: impl Into<String>,
        locality: usize,
        seed_alphabet: Vec<String>,
        rule: impl Fn(&View, &[String]) -> Result<NodeOutput> + Send + Sync + 'static,
    ) -> Self {
        LocalAlgorithm {
            name: name.into(),
            locality,
            seed_alphabet,
            node_alphabet: None,
            half_edge_alphabet: None,
            rule: Arc::new(move |view, seeds| match seeds {
                Some(s) => rule(view, s),
                None => contract("randomized rule evaluated without seeds"),
            }),
        }
    }

    /// Declares output alphabets; outputs outside them become contract errors.
    pub fn with_output_alphabets(mut self, nodes: BTreeSet<String>, half_edges: BTreeSet<String>) -> Self {
        self.node_alphabet = Some(nodes);
        self.half_edge_alphabet = Some(half_edges);
        self
    }

    pub fn is_randomized(&self) -> bool {
        !self.seed_alphabet.is_empty()
    }

    /// Evaluates the rule on a single-anchor view and checks the result.
    pub fn evaluate(&self, view: &View, seeds: Option<&[String]>) -> Result<NodeOutput> {
        let out = (self.rule)(view, seeds)?;
        let expected = view.ports[view.anchor()].len();
        if out.ports.len() != expected {
            return contract(format!("{}: {} port labels for {expected} half-edges", self.name, out.ports.len()));
        }
        if let Some(a) = &self.node_alphabet {
            if !a.contains(&out.label) {
                return contract(format!("{}: node label {:?} outside the declared alphabet", self.name, out.label));
            }
        }
        if let Some(a) = &self.half_edge_alphabet {
            if let Some(bad) = out.ports.iter().find(|p| !a.contains(*p)) {
                return contract(format!("{}: half-edge label {bad:?} outside the declared alphabet", self.name));
            }
        }
        Ok(out)
    }

    fn views(&self, g: &LabeledGraph) -> Result<Vec<View>> {
        (0..g.graph.node_count()).map(|v| extract_view(g, &[v], self.locality)).collect()
    }
}

fn write_output(g: &LabeledGraph, labeling: &mut Labeling, v: NodeId, out: &NodeOutput) {
    labeling.nodes[v] = out.label.clone();
    for (&edge, label) in g.graph.adjacency(v).iter().zip(&out.ports) {
        labeling.set_half_edge(&g.graph, HalfEdge { node: v, edge }, label.clone());
    }
}

fn empty_labeling(g: &LabeledGraph) -> Labeling {
    Labeling {
        nodes: vec![String::new(); g.graph.node_count()],
        half_edges: vec![Default::default(); g.graph.edge_count()],
    }
}

/// Runs a deterministic algorithm: one rule evaluation per node.
pub fn run_local(a: &LocalAlgorithm, g: &LabeledGraph) -> Result<Labeling> {
    if a.is_randomized() {
        return input(format!("{} is randomized; use run_rand_local", a.name));
    }
    let mut labeling = empty_labeling(g);
    for (v, view) in a.views(g)?.iter().enumerate() {
        let out = a.evaluate(view, None)?;
        write_output(g, &mut labeling, v, &out);
    }
    Ok(labeling)
}

/// How randomized LOCAL seeds are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeedMode {
    /// Every assignment in `alphabet^n`, each with equal weight.
    Exact,
    /// `samples` assignments drawn uniformly from a seeded generator.
    Sample { samples: usize, seed: u64 },
}

/// Output distribution of a randomized algorithm.
pub fn run_rand_local(a: &LocalAlgorithm, g: &LabeledGraph, mode: SeedMode) -> Result<Outcome> {
    if !a.is_randomized() {
        return Outcome::deterministic(g.clone(), run_local(a, g)?);
    }
    let n = g.graph.node_count();
    let k = a.seed_alphabet.len();
    let views = a.views(g)?;
    // Each node's output depends only on the seeds inside its view.
    let mut caches: Vec<HashMap<Vec<usize>, NodeOutput>> = vec![HashMap::new(); n];
    let mut run = |assignment: &[usize]| -> Result<Labeling> {
        let mut labeling = empty_labeling(g);
        for (v, view) in views.iter().enumerate() {
            let key: Vec<usize> = view.origin_nodes.iter().map(|&u| assignment[u]).collect();
            let out = match caches[v].get(&key) {
                Some(out) => out.clone(),
                None => {
                    let seeds: Vec<String> = key.iter().map(|&i| a.seed_alphabet[i].clone()).collect();
                    let out = a.evaluate(view, Some(&seeds))?;
                    caches[v].insert(key, out.clone());
                    out
                }
            };
            write_output(g, &mut labeling, v, &out);
        }
        Ok(labeling)
    };

    let mut counts: BTreeMap<Labeling, u64> = BTreeMap::new();
    let total: u64 = match mode {
        SeedMode::Exact => {
            let total = (0..n).try_fold(1u64, |acc, _| acc.checked_mul(k as u64).filter(|&t| t <= EXACT_SEED_LIMIT));
            let Some(total) = total else {
                return input(format!("{k}^{n} seed assignments exceed the exact limit of {EXACT_SEED_LIMIT}"));
            };
            let mut assignment = vec![0usize; n];
            loop {
                *counts.entry(run(&assignment)?).or_insert(0) += 1;
                // Odometer increment.
                let mut i = 0;
                while i < n && assignment[i] + 1 == k {
                    assignment[i] = 0;
                    i += 1;
                }
                if i == n {
                    break;
                }
                assignment[i] += 1;
            }
            total
        }
        SeedMode::Sample { samples, seed } => {
            if samples == 0 {
                return input("sampling mode needs at least one sample");
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                let assignment: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
                *counts.entry(run(&assignment)?).or_insert(0) += 1;
            }
            samples as u64
        }
    };
    let entries = counts.into_iter().map(|(l, c)| (l, ratio(c as i64, total as i64)));
    Outcome::new(g.clone(), entries)
}

/// A sequential algorithm: nodes are processed one at a time in a given
/// order, each reading a bounded view together with stored states.
pub trait SlocalAlgorithm {
    type State: Clone + Default;

    fn name(&self) -> &str;

    /// Largest radius a step may query.
    fn locality(&self) -> usize;

    /// Processes `ctx.node()` and returns its output.
    fn step(&self, ctx: &mut StepContext<'_, Self::State>) -> Result<NodeOutput>;
}

/// What a single SLOCAL step may observe and modify.
///
/// States may be read and written only for nodes inside a view the step
/// has queried; the current node is always visible.
pub struct StepContext<'a, S> {
    graph: &'a LabeledGraph,
    node: NodeId,
    states: &'a mut [S],
    processed: &'a [bool],
    locality: usize,
    queried: usize,
    visible: BTreeSet<NodeId>,
}

impl<S> StepContext<'_, S> {
    pub fn node(&self) -> NodeId {
        self.node
    }

    /// The view of radius `radius` around the current node.
    pub fn view(&mut self, radius: usize) -> Result<View> {
        if radius > self.locality {
            return contract(format!("step queried radius {radius} beyond locality {}", self.locality));
        }
        let view = extract_view(self.graph, &[self.node], radius)?;
        self.queried = self.queried.max(radius);
        self.visible.extend(view.origin_nodes.iter().copied());
        Ok(view)
    }

    fn check_visible(&self, v: NodeId) -> Result<()> {
        if self.visible.contains(&v) {
            Ok(())
        } else {
            contract(format!("node {v} is outside the queried view of node {}", self.node))
        }
    }

    pub fn state(&self, v: NodeId) -> Result<&S> {
        self.check_visible(v)?;
        Ok(&self.states[v])
    }

    pub fn is_processed(&self, v: NodeId) -> Result<bool> {
        self.check_visible(v)?;
        Ok(self.processed[v])
    }

    pub fn set_state(&mut self, v: NodeId, state: S) -> Result<()> {
        self.check_visible(v)?;
        self.states[v] = state;
        Ok(())
    }
}

/// Result of one SLOCAL run.
#[derive(Clone, Debug)]
pub struct SlocalRun<S> {
    pub labeling: Labeling,
    /// Largest radius queried by any step.
    pub locality: usize,
    pub states: Vec<S>,
}

pub fn run_slocal<A: SlocalAlgorithm>(a: &A, g: &LabeledGraph, order: &[NodeId]) -> Result<SlocalRun<A::State>> {
    let n = g.graph.node_count();
    let mut seen = vec![false; n];
    if order.len() != n || order.iter().any(|&v| v >= n || std::mem::replace(&mut seen[v], true)) {
        return input("processing order is not a permutation of the nodes");
    }
    let mut states = vec![A::State::default(); n];
    let mut processed = vec![false; n];
    let mut labeling = empty_labeling(g);
    let mut locality = 0;
    for &v in order {
        let mut ctx = StepContext {
            graph: g,
            node: v,
            states: &mut states,
            processed: &processed,
            locality: a.locality(),
            queried: 0,
            visible: BTreeSet::from([v]),
        };
        let out = a.step(&mut ctx)?;
        locality = locality.max(ctx.queried);
        if out.ports.len() != g.graph.degree(v) {
            return contract(format!("{}: {} port labels for degree {}", a.name(), out.ports.len(), g.graph.degree(v)));
        }
        write_output(g, &mut labeling, v, &out);
        processed[v] = true;
    }
    Ok(SlocalRun { labeling, locality, states })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Graph, ANON};
    use crate::rational::{one, Rational};

    fn bits() -> Vec<String> {
        vec!["0".into(), "1".into()]
    }

    fn own_seed() -> LocalAlgorithm {
        LocalAlgorithm::randomized("own-seed", 0, bits(), |view, seeds| {
            Ok(NodeOutput::uniform(view, &seeds[view.anchor()], ANON))
        })
    }

    #[test]
    fn constant_rule() {
        let a = LocalAlgorithm::deterministic("zero", 1, |v| Ok(NodeOutput::uniform(v, "0", "0")));
        let g = LabeledGraph::anonymous(Graph::cycle(5));
        let l = run_local(&a, &g).unwrap();
        assert!(l.nodes.iter().all(|x| x == "0"));
        assert!(l.half_edges.iter().flatten().all(|x| x == "0"));
    }

    #[test]
    fn degree_rule_on_path() {
        let a = LocalAlgorithm::deterministic("degree", 1, |v| {
            Ok(NodeOutput::uniform(v, &v.graph.graph.degree(v.anchor()).to_string(), ANON))
        });
        let l = run_local(&a, &LabeledGraph::anonymous(Graph::path(3))).unwrap();
        assert_eq!(l.nodes, vec!["1", "2", "1"]);
    }

    #[test]
    fn alphabet_and_port_contracts() {
        let g = LabeledGraph::anonymous(Graph::path(3));
        let a = LocalAlgorithm::deterministic("bad", 1, |v| Ok(NodeOutput::uniform(v, "z", ANON)))
            .with_output_alphabets(BTreeSet::from(["a".to_string()]), BTreeSet::from([ANON.to_string()]));
        assert!(matches!(run_local(&a, &g), Err(crate::Error::Contract(_))));
        let short = LocalAlgorithm::deterministic("short", 1, |_| Ok(NodeOutput::new("a", vec![])));
        assert!(matches!(run_local(&short, &g), Err(crate::Error::Contract(_))));
    }

    #[test]
    fn seedless_outcome_is_deterministic() {
        let a = LocalAlgorithm::deterministic("zero", 0, |v| Ok(NodeOutput::uniform(v, "0", ANON)));
        let o = run_rand_local(&a, &LabeledGraph::anonymous(Graph::path(4)), SeedMode::Exact).unwrap();
        assert_eq!(o.len(), 1);
    }

    #[test]
    fn seed_enumeration() {
        let one_node = run_rand_local(&own_seed(), &LabeledGraph::anonymous(Graph::path(1)), SeedMode::Exact).unwrap();
        assert_eq!(one_node.len(), 2);
        assert!(one_node.support().all(|(_, p)| *p == ratio(1, 2)));
        let two = run_rand_local(&own_seed(), &LabeledGraph::anonymous(Graph::path(2)), SeedMode::Exact).unwrap();
        assert_eq!(two.len(), 4);
        assert!(two.support().all(|(_, p)| *p == ratio(1, 4)));
    }

    #[test]
    fn seed_space_guard() {
        let g = LabeledGraph::anonymous(Graph::path(25));
        assert!(matches!(run_rand_local(&own_seed(), &g, SeedMode::Exact), Err(crate::Error::Input(_))));
        let o = run_rand_local(&own_seed(), &g, SeedMode::Sample { samples: 50, seed: 7 }).unwrap();
        let total: Rational = o.support().map(|(_, p)| p.clone()).sum();
        assert_eq!(total, one());
    }

    /// Each node marks itself; reports the radius it was told to query.
    struct Probe(usize);

    impl SlocalAlgorithm for Probe {
        type State = u32;
        fn name(&self) -> &str {
            "probe"
        }
        fn locality(&self) -> usize {
            self.0
        }
        fn step(&self, ctx: &mut StepContext<'_, u32>) -> Result<NodeOutput> {
            let view = ctx.view(self.0)?;
            let seen = view.origin_nodes.iter().filter(|&&u| ctx.is_processed(u).unwrap()).count();
            let v = ctx.node();
            ctx.set_state(v, 1)?;
            Ok(NodeOutput::uniform(&view, &seen.to_string(), ANON))
        }
    }

    #[test]
    fn slocal_sees_earlier_nodes() {
        let g = LabeledGraph::anonymous(Graph::path(3));
        let run = run_slocal(&Probe(1), &g, &[0, 1, 2]).unwrap();
        assert_eq!(run.labeling.nodes, vec!["0", "1", "1"]);
        assert_eq!(run.locality, 1);
        let single = run_slocal(&Probe(2), &LabeledGraph::anonymous(Graph::path(1)), &[0]).unwrap();
        assert!(single.locality <= 2);
        assert!(run_slocal(&Probe(1), &g, &[0, 0, 1]).is_err());
    }

    struct Reacher;

    impl SlocalAlgorithm for Reacher {
        type State = ();
        fn name(&self) -> &str {
            "reacher"
        }
        fn locality(&self) -> usize {
            1
        }
        fn step(&self, ctx: &mut StepContext<'_, ()>) -> Result<NodeOutput> {
            let view = ctx.view(1)?;
            ctx.set_state(2, ())?;
            Ok(NodeOutput::uniform(&view, "x", ANON))
        }
    }

    #[test]
    fn slocal_writes_outside_view_are_contract_errors() {
        let g = LabeledGraph::anonymous(Graph::path(4));
        assert!(matches!(run_slocal(&Reacher, &g, &[0, 1, 2, 3]), Err(crate::Error::Contract(_))));
    }
}
