//! Locally checkable labelings: constraint sets of centered labeled balls,
//! and exhaustive verification of every node's radius-`r` ball.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::graph::{centered_isomorphic, CenteredGraph, Distance, GraphJson, LabeledGraph, Labeling, NodeId};

/// Separator used when forming product labels `(input, output)`.
pub const PRODUCT_SEP: char = '|';

pub fn product_label(input: &str, output: &str) -> String {
    format!("{input}{PRODUCT_SEP}{output}")
}

pub fn product_alphabet(a: &BTreeSet<String>, b: &BTreeSet<String>) -> BTreeSet<String> {
    a.iter().flat_map(|x| b.iter().map(move |y| product_label(x, y))).collect()
}

/// Cheap isomorphism invariant used to bucket members.
type BallKey = (usize, usize, String, Vec<(usize, String)>);

fn ball_key(c: &CenteredGraph) -> BallKey {
    let g = &c.graph.graph;
    let mut profile: Vec<(usize, String)> =
        (0..g.node_count()).map(|v| (g.degree(v), c.graph.node_label(v).to_string())).collect();
    profile.sort_unstable();
    (g.node_count(), g.edge_count(), c.graph.node_label(c.center).to_string(), profile)
}

/// An `(r, Δ)`-set of constraints over `(node_alphabet, half_edge_alphabet)`.
#[derive(Clone, Debug)]
pub struct ConstraintSet {
    radius: usize,
    max_degree: usize,
    node_alphabet: BTreeSet<String>,
    half_edge_alphabet: BTreeSet<String>,
    members: Vec<CenteredGraph>,
    index: BTreeMap<BallKey, Vec<usize>>,
}

impl ConstraintSet {
    pub fn empty(
        radius: usize,
        max_degree: usize,
        node_alphabet: BTreeSet<String>,
        half_edge_alphabet: BTreeSet<String>,
    ) -> Self {
        ConstraintSet {
            radius,
            max_degree,
            node_alphabet,
            half_edge_alphabet,
            members: Vec::new(),
            index: BTreeMap::new(),
        }
    }

    /// Builds a constraint set; duplicate (isomorphic) members are rejected.
    pub fn new(
        radius: usize,
        max_degree: usize,
        node_alphabet: BTreeSet<String>,
        half_edge_alphabet: BTreeSet<String>,
        members: Vec<CenteredGraph>,
    ) -> Result<Self> {
        let mut set = Self::empty(radius, max_degree, node_alphabet, half_edge_alphabet);
        for (i, m) in members.into_iter().enumerate() {
            if !set.insert(m)? {
                return input(format!("constraint member {i} duplicates an earlier member"));
            }
        }
        Ok(set)
    }

    /// The closure of `g`: every radius-`r` ball that occurs in it.
    pub fn from_balls_of(g: &LabeledGraph, radius: usize, max_degree: usize) -> Result<Self> {
        let mut set = Self::empty(radius, max_degree, g.node_alphabet.clone(), g.half_edge_alphabet.clone());
        set.absorb(g)?;
        Ok(set)
    }

    /// Adds every radius-`r` ball of `g` not already present.
    pub fn absorb(&mut self, g: &LabeledGraph) -> Result<()> {
        for v in 0..g.graph.node_count() {
            self.insert(centered_ball(g, v, self.radius)?)?;
        }
        Ok(())
    }

    /// Inserts a member unless an isomorphic one exists; returns whether it
    /// was new.
    pub fn insert(&mut self, member: CenteredGraph) -> Result<bool> {
        self.validate(&member)?;
        if self.find(&member).is_some() {
            return Ok(false);
        }
        let key = ball_key(&member);
        self.index.entry(key).or_default().push(self.members.len());
        self.members.push(member);
        Ok(true)
    }

    fn validate(&self, m: &CenteredGraph) -> Result<()> {
        match m.eccentricity() {
            Distance::Finite(d) if d <= self.radius => {}
            other => return input(format!("member eccentricity {other} exceeds radius {}", self.radius)),
        }
        if m.graph.graph.max_degree() > self.max_degree {
            return input(format!("member degree exceeds Δ = {}", self.max_degree));
        }
        self.check_alphabet(&m.graph)
    }

    fn check_alphabet(&self, g: &LabeledGraph) -> Result<()> {
        if let Some(bad) = g.labels.nodes.iter().find(|l| !self.node_alphabet.contains(*l)) {
            return input(format!("node label {bad:?} outside the constraint alphabet"));
        }
        if let Some(bad) = g.labels.half_edges.iter().flatten().find(|l| !self.half_edge_alphabet.contains(*l)) {
            return input(format!("half-edge label {bad:?} outside the constraint alphabet"));
        }
        Ok(())
    }

    /// Index of a member isomorphic to `ball`, if any.
    pub fn find(&self, ball: &CenteredGraph) -> Option<usize> {
        self.index
            .get(&ball_key(ball))?
            .iter()
            .copied()
            .find(|&i| centered_isomorphic(ball, &self.members[i]).is_some())
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn node_alphabet(&self) -> &BTreeSet<String> {
        &self.node_alphabet
    }

    pub fn half_edge_alphabet(&self) -> &BTreeSet<String> {
        &self.half_edge_alphabet
    }

    pub fn members(&self) -> &[CenteredGraph] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// `(G[N_r[v]], v)` with all labels.
pub fn centered_ball(g: &LabeledGraph, v: NodeId, radius: usize) -> Result<CenteredGraph> {
    let nodes: Vec<NodeId> = g.graph.neighborhood(&[v], radius)?.into_iter().collect();
    let center = nodes.iter().position(|&u| u == v).expect("v is in its own ball");
    let (graph, _) = g.induced(&nodes);
    Ok(CenteredGraph { graph, center })
}

/// Outcome of checking every node against a constraint set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintVerdict {
    /// Violating nodes, ascending.
    pub violations: Vec<NodeId>,
    /// Matched member per node (`None` for violators).
    pub witnesses: Vec<Option<usize>>,
}

impl ConstraintVerdict {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_constraints(g: &LabeledGraph, c: &ConstraintSet) -> Result<ConstraintVerdict> {
    c.check_alphabet(g)?;
    let mut witnesses = Vec::with_capacity(g.graph.node_count());
    for v in 0..g.graph.node_count() {
        witnesses.push(c.find(&centered_ball(g, v, c.radius)?));
    }
    let violations = witnesses.iter().enumerate().filter(|(_, w)| w.is_none()).map(|(v, _)| v).collect();
    Ok(ConstraintVerdict { violations, witnesses })
}

/// An LCL problem: input/output alphabets and constraints over product labels.
#[derive(Clone, Debug)]
pub struct LclProblem {
    pub node_in: BTreeSet<String>,
    pub half_edge_in: BTreeSet<String>,
    pub node_out: BTreeSet<String>,
    pub half_edge_out: BTreeSet<String>,
    pub constraints: ConstraintSet,
}

impl LclProblem {
    pub fn new(
        node_in: BTreeSet<String>,
        half_edge_in: BTreeSet<String>,
        node_out: BTreeSet<String>,
        half_edge_out: BTreeSet<String>,
        constraints: ConstraintSet,
    ) -> Result<Self> {
        if constraints.node_alphabet != product_alphabet(&node_in, &node_out) {
            return input("constraint node alphabet is not V_in x V_out");
        }
        if constraints.half_edge_alphabet != product_alphabet(&half_edge_in, &half_edge_out) {
            return input("constraint half-edge alphabet is not E_in x E_out");
        }
        Ok(LclProblem { node_in, half_edge_in, node_out, half_edge_out, constraints })
    }

    /// Forms the product labeling of `input` and `out`.
    pub fn product(&self, input_graph: &LabeledGraph, out: &Labeling) -> Result<LabeledGraph> {
        let g = &input_graph.graph;
        if out.nodes.len() != g.node_count() || out.half_edges.len() != g.edge_count() {
            return input("output labeling is missing labels for some nodes or half-edges");
        }
        if let Some(bad) = input_graph.labels.nodes.iter().find(|l| !self.node_in.contains(*l)) {
            return input(format!("input node label {bad:?} outside V_in"));
        }
        if let Some(bad) = input_graph.labels.half_edges.iter().flatten().find(|l| !self.half_edge_in.contains(*l)) {
            return input(format!("input half-edge label {bad:?} outside E_in"));
        }
        if let Some(bad) = out.nodes.iter().find(|l| !self.node_out.contains(*l)) {
            return input(format!("output node label {bad:?} outside V_out"));
        }
        if let Some(bad) = out.half_edges.iter().flatten().find(|l| !self.half_edge_out.contains(*l)) {
            return input(format!("output half-edge label {bad:?} outside E_out"));
        }
        let labels = Labeling {
            nodes: input_graph.labels.nodes.iter().zip(&out.nodes).map(|(a, b)| product_label(a, b)).collect(),
            half_edges: input_graph
                .labels
                .half_edges
                .iter()
                .zip(&out.half_edges)
                .map(|([a0, a1], [b0, b1])| [product_label(a0, b0), product_label(a1, b1)])
                .collect(),
        };
        LabeledGraph::with_alphabets(
            g.clone(),
            labels,
            self.constraints.node_alphabet.clone(),
            self.constraints.half_edge_alphabet.clone(),
        )
    }
}

pub fn verify_lcl_solution(p: &LclProblem, input_graph: &LabeledGraph, out: &Labeling) -> Result<ConstraintVerdict> {
    check_constraints(&p.product(input_graph, out)?, &p.constraints)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MemberJson {
    pub graph: GraphJson,
    pub center: NodeId,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstraintSetJson {
    pub radius: usize,
    pub max_degree: usize,
    pub node_alphabet: BTreeSet<String>,
    pub half_edge_alphabet: BTreeSet<String>,
    pub members: Vec<MemberJson>,
}

impl ConstraintSetJson {
    pub fn from_set(c: &ConstraintSet) -> Self {
        ConstraintSetJson {
            radius: c.radius,
            max_degree: c.max_degree,
            node_alphabet: c.node_alphabet.clone(),
            half_edge_alphabet: c.half_edge_alphabet.clone(),
            members: c
                .members
                .iter()
                .map(|m| MemberJson { graph: GraphJson::from_labeled(&m.graph), center: m.center })
                .collect(),
        }
    }

    pub fn to_set(&self) -> Result<ConstraintSet> {
        let members = self
            .members
            .iter()
            .map(|m| {
                let graph = m.graph.to_labeled()?;
                graph.graph.check_node(m.center)?;
                Ok(CenteredGraph { graph, center: m.center })
            })
            .collect::<Result<Vec<_>>>()?;
        ConstraintSet::new(
            self.radius,
            self.max_degree,
            self.node_alphabet.clone(),
            self.half_edge_alphabet.clone(),
            members,
        )
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LclProblemJson {
    pub node_in: BTreeSet<String>,
    pub half_edge_in: BTreeSet<String>,
    pub node_out: BTreeSet<String>,
    pub half_edge_out: BTreeSet<String>,
    pub constraints: ConstraintSetJson,
}

impl LclProblemJson {
    pub fn from_problem(p: &LclProblem) -> Self {
        LclProblemJson {
            node_in: p.node_in.clone(),
            half_edge_in: p.half_edge_in.clone(),
            node_out: p.node_out.clone(),
            half_edge_out: p.half_edge_out.clone(),
            constraints: ConstraintSetJson::from_set(&p.constraints),
        }
    }

    pub fn to_problem(&self) -> Result<LclProblem> {
        LclProblem::new(
            self.node_in.clone(),
            self.half_edge_in.clone(),
            self.node_out.clone(),
            self.half_edge_out.clone(),
            self.constraints.to_set()?,
        )
    }
}
