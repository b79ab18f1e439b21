//! Linear programs bound to a graph, solved and checked in exact rational
//! arithmetic.

mod dequant;
mod simplex;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::graph::{EdgeId, Graph, GraphJson, NodeId};
use crate::rational::{self, one, zero, Rational};

pub use dequant::{
    cycle_completion, dequantize, labeling_from_point, local_expectation_algorithm, point_from_labeling,
    whole_graph_completion, Completed, Completion, Oracle,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LpKind {
    NodeBased,
    EdgeBased,
    NodeEdgeBased,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Owner {
    Node(NodeId),
    Edge(EdgeId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

impl Relation {
    fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub owner: Owner,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    #[serde(with = "coefficient_map")]
    pub coefficients: BTreeMap<String, Rational>,
    pub relation: Relation,
    #[serde(with = "rational::as_string")]
    pub bound: Rational,
    pub owner: NodeId,
}

/// A linear program over nonnegative variables owned by nodes or edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistLp {
    pub kind: LpKind,
    pub sense: Sense,
    pub graph: Graph,
    variables: Vec<Variable>,
    rows: Vec<Row>,
    objective: BTreeMap<String, Rational>,
}

impl DistLp {
    /// Validates ownership and locality: every variable in a row is owned
    /// by nodes within distance 1 of the row's owner.
    pub fn new(
        kind: LpKind,
        sense: Sense,
        graph: Graph,
        variables: Vec<Variable>,
        rows: Vec<Row>,
        objective: BTreeMap<String, Rational>,
    ) -> Result<Self> {
        let mut owners = BTreeMap::new();
        for v in &variables {
            match v.owner {
                Owner::Node(u) => {
                    graph.check_node(u)?;
                    if kind == LpKind::EdgeBased {
                        return input(format!("edge-based LP has node variable {}", v.name));
                    }
                }
                Owner::Edge(e) => {
                    if e >= graph.edge_count() {
                        return input(format!("variable {} owned by unknown edge {e}", v.name));
                    }
                    if kind == LpKind::NodeBased {
                        return input(format!("node-based LP has edge variable {}", v.name));
                    }
                }
            }
            if owners.insert(v.name.clone(), v.owner).is_some() {
                return input(format!("duplicate variable {}", v.name));
            }
        }
        for (j, row) in rows.iter().enumerate() {
            graph.check_node(row.owner)?;
            let dist = graph.bfs([row.owner]);
            let near = |u: NodeId| matches!(dist[u], Some(d) if d <= 1);
            for name in row.coefficients.keys() {
                let Some(owner) = owners.get(name) else {
                    return input(format!("row {j} uses unknown variable {name}"));
                };
                let local = match *owner {
                    Owner::Node(u) => near(u),
                    Owner::Edge(e) => {
                        let (a, b) = graph.endpoints(e);
                        near(a) && near(b)
                    }
                };
                if !local {
                    return input(format!("row {j} owned by node {} uses non-local variable {name}", row.owner));
                }
            }
        }
        if let Some(name) = objective.keys().find(|k| !owners.contains_key(*k)) {
            return input(format!("objective uses unknown variable {name}"));
        }
        Ok(DistLp { kind, sense, graph, variables, rows, objective })
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn objective(&self) -> &BTreeMap<String, Rational> {
        &self.objective
    }

    fn check_total(&self, x: &LpPoint) -> Result<()> {
        if let Some(v) = self.variables.iter().find(|v| !x.0.contains_key(&v.name)) {
            return input(format!("point has no value for variable {}", v.name));
        }
        if x.0.len() != self.variables.len() {
            let known: BTreeSet<&str> = self.variables.iter().map(|v| v.name.as_str()).collect();
            let extra = x.0.keys().find(|k| !known.contains(k.as_str())).expect("some key is unknown");
            return input(format!("point names unknown variable {extra}"));
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &LpPoint) -> Result<Rational> {
        self.check_total(x)?;
        Ok(self.objective.iter().map(|(k, c)| c * &x.0[k]).sum())
    }
}

/// Values for every variable of an LP.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpPoint(#[serde(with = "coefficient_map")] pub BTreeMap<String, Rational>);

impl LpPoint {
    pub fn get(&self, name: &str) -> Option<&Rational> {
        self.0.get(name)
    }
}

mod coefficient_map {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::rational::{self, Rational};

    pub fn serialize<S: Serializer>(m: &BTreeMap<String, Rational>, s: S) -> Result<S::Ok, S::Error> {
        m.iter().map(|(k, v)| (k.clone(), rational::format(v))).collect::<BTreeMap<_, _>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, Rational>, D::Error> {
        let raw = BTreeMap::<String, String>::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| rational::parse(&v).map(|r| (k, r)).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Constraint rows violated by a point, and variables that are negative.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Feasibility {
    pub violated_rows: Vec<usize>,
    pub negative: Vec<String>,
}

impl Feasibility {
    pub fn is_ok(&self) -> bool {
        self.violated_rows.is_empty() && self.negative.is_empty()
    }
}

pub fn check_feasible(p: &DistLp, x: &LpPoint) -> Result<Feasibility> {
    p.check_total(x)?;
    let negative = x.0.iter().filter(|(_, v)| v.is_negative()).map(|(k, _)| k.clone()).collect();
    let violated_rows = p
        .rows
        .iter()
        .enumerate()
        .filter(|(_, row)| {
            let lhs: Rational = row.coefficients.iter().map(|(k, c)| c * &x.0[k]).sum();
            !row.relation.holds(&lhs, &row.bound)
        })
        .map(|(j, _)| j)
        .collect();
    Ok(Feasibility { violated_rows, negative })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOptimum {
    Optimal { value: Rational, point: LpPoint },
    Unbounded,
    Infeasible,
}

/// Optimal objective by exact simplex.
pub fn exact_opt(p: &DistLp) -> LpOptimum {
    let index: BTreeMap<&str, usize> = p.variables.iter().enumerate().map(|(i, v)| (v.name.as_str(), i)).collect();
    let n = p.variables.len();
    let rows: Vec<simplex::DenseRow> = p
        .rows
        .iter()
        .map(|row| {
            let mut coefficients = vec![zero(); n];
            for (k, c) in &row.coefficients {
                coefficients[index[k.as_str()]] += c;
            }
            simplex::DenseRow { coefficients, relation: row.relation, bound: row.bound.clone() }
        })
        .collect();
    let mut cost = vec![zero(); n];
    for (k, c) in &p.objective {
        cost[index[k.as_str()]] = match p.sense {
            Sense::Maximize => -c.clone(),
            Sense::Minimize => c.clone(),
        };
    }
    match simplex::minimize(&cost, &rows) {
        simplex::SimplexResult::Optimal { value, point } => LpOptimum::Optimal {
            value: match p.sense {
                Sense::Maximize => -value,
                Sense::Minimize => value,
            },
            point: LpPoint(p.variables.iter().map(|v| v.name.clone()).zip(point).collect()),
        },
        simplex::SimplexResult::Unbounded => LpOptimum::Unbounded,
        simplex::SimplexResult::Infeasible => LpOptimum::Infeasible,
    }
}

/// Approximation factor of a point, always `>= 1` for feasible points.
///
/// Ordered so that `Ratio(_) < Infinite < Infeasible`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Approximation {
    Ratio(Rational),
    Infinite,
    Infeasible,
}

impl fmt::Display for Approximation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Approximation::Ratio(r) => f.write_str(&rational::format(r)),
            Approximation::Infinite => f.write_str("inf"),
            Approximation::Infeasible => f.write_str("infeasible"),
        }
    }
}

pub fn approximation_ratio(p: &DistLp, x: &LpPoint) -> Result<Approximation> {
    approximation_against(p, x, &exact_opt(p))
}

/// [`approximation_ratio`] with the optimum already known.
pub fn approximation_against(p: &DistLp, x: &LpPoint, opt: &LpOptimum) -> Result<Approximation> {
    if !check_feasible(p, x)?.is_ok() {
        return Ok(Approximation::Infeasible);
    }
    let value = p.objective_value(x)?;
    let opt = match opt {
        LpOptimum::Optimal { value, .. } => value.clone(),
        LpOptimum::Unbounded => return input("LP is unbounded; no approximation ratio exists"),
        LpOptimum::Infeasible => return Ok(Approximation::Infeasible),
    };
    let (num, den) = match p.sense {
        Sense::Maximize => (opt, value),
        Sense::Minimize => (value, opt),
    };
    Ok(if num == den {
        Approximation::Ratio(one())
    } else if den.is_zero() {
        Approximation::Infinite
    } else {
        Approximation::Ratio(num / den)
    })
}

/// Variable name of edge `e` in the matching LP.
pub fn edge_var(e: EdgeId) -> String {
    format!("e{e}")
}

/// Fractional maximum matching: `max Σ x_e`, `Σ_{e ∋ v} x_e <= 1`, `x_e <= 1`.
pub fn build_fractional_matching_lp(g: &Graph) -> Result<DistLp> {
    if g.is_multi() {
        return input("the matching LP is defined on simple graphs");
    }
    let variables: Vec<Variable> =
        (0..g.edge_count()).map(|e| Variable { name: edge_var(e), owner: Owner::Edge(e) }).collect();
    let mut rows: Vec<Row> = (0..g.node_count())
        .map(|v| Row {
            coefficients: g.adjacency(v).iter().map(|&e| (edge_var(e), one())).collect(),
            relation: Relation::Le,
            bound: one(),
            owner: v,
        })
        .collect();
    rows.extend(g.edges().iter().enumerate().map(|(e, &(a, b))| Row {
        coefficients: BTreeMap::from([(edge_var(e), one())]),
        relation: Relation::Le,
        bound: one(),
        owner: a.min(b),
    }));
    let objective = variables.iter().map(|v| (v.name.clone(), one())).collect();
    DistLp::new(LpKind::EdgeBased, Sense::Maximize, g.clone(), variables, rows, objective)
}

/// The 0/1 point of a maximal matching; rejects non-matchings and
/// non-maximal matchings with a witness.
pub fn maximal_matching_to_fractional(g: &Graph, matching: &[EdgeId]) -> Result<LpPoint> {
    if let Some(defect) = crate::linearizable::is_maximal_matching(g, matching) {
        return input(defect.to_string());
    }
    Ok(LpPoint(
        (0..g.edge_count()).map(|e| (edge_var(e), if matching.contains(&e) { one() } else { zero() })).collect(),
    ))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LpJson {
    pub kind: LpKind,
    pub sense: Sense,
    pub graph: GraphJson,
    pub variables: Vec<Variable>,
    pub rows: Vec<Row>,
    #[serde(with = "coefficient_map")]
    pub objective: BTreeMap<String, Rational>,
}

impl LpJson {
    pub fn from_lp(p: &DistLp) -> Self {
        LpJson {
            kind: p.kind,
            sense: p.sense,
            graph: GraphJson::from_graph(&p.graph),
            variables: p.variables.clone(),
            rows: p.rows.clone(),
            objective: p.objective.clone(),
        }
    }

    pub fn to_lp(&self) -> Result<DistLp> {
        DistLp::new(
            self.kind,
            self.sense,
            self.graph.to_graph()?,
            self.variables.clone(),
            self.rows.clone(),
            self.objective.clone(),
        )
    }
}
