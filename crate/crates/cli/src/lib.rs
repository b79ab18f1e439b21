//! Command implementations behind the `nslab` binary. Each function takes
//! already-parsed inputs, delegates to the library and returns a
//! [`Response`]; the binary only reads files and prints.

use std::collections::BTreeMap;
use std::path::Path;

use nslab_core::gadgets::{
    gen_octopus, gen_proper_instance, gen_tree_like, lift_slocal_algorithm, proper_instance_dot, pullback_labeling,
    verify_pi_promise, ProperInstanceJson,
};
use nslab_core::graph::{to_dot, Graph, GraphJson, LabeledGraph, NodeId};
use nslab_core::lcl::{verify_lcl_solution, ConstraintSet, ConstraintSetJson, LclProblemJson};
use nslab_core::linearizable::{
    decode_to_matching, encode_matching, greedy_matching_edges, incidence_from_json, incidence_labels,
    incidence_to_json, labels_by_edge, verify_linearizable, IncidenceGraph, LinearizableProblem,
    LinearizableProblemJson,
};
use nslab_core::lp::{
    approximation_ratio, build_fractional_matching_lp, check_feasible, dequantize, exact_opt, LpJson, LpOptimum,
    LpPoint,
};
use nslab_core::outcome::{
    run_local, run_rand_local, run_slocal, verify_non_signaling, LabelsJson, OutcomeJson, SeedMode,
    DEFAULT_ISOMORPHISM_CAP,
};
use nslab_core::rational;
use nslab_suite::algorithms::{local_algorithm, slocal_algorithm, LOCAL_ALGORITHMS, SLOCAL_ALGORITHMS};
use nslab_suite::{run_suite, SuiteError, SUITES};
use serde_json::{json, Value};

/// What a command produced.
#[derive(Clone, Debug, PartialEq)]
pub struct Response {
    /// False when a verification rejected its input.
    pub ok: bool,
    pub json: Value,
    pub text: String,
    /// Graphviz rendering of the main graph, when there is one.
    pub dot: Option<String>,
}

impl Response {
    fn new(ok: bool, json: Value, text: impl Into<String>) -> Self {
        Response { ok, json, text: text.into(), dot: None }
    }

    fn with_dot(mut self, dot: String) -> Self {
        self.dot = Some(dot);
        self
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] nslab_core::Error),
    #[error(transparent)]
    Suite(#[from] SuiteError),
}

pub type Result<T> = std::result::Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(CliError::Usage(msg.into()))
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("library types serialize")
}

/// Edge-indexed labels `{"0": "M", ...}` as a dense vector.
pub fn dense_labels(labels: &BTreeMap<usize, String>, edges: usize) -> Result<Vec<String>> {
    if labels.len() != edges || labels.keys().enumerate().any(|(i, &k)| i != k) {
        return usage(format!("expected one label for each edge 0..{edges}"));
    }
    Ok(labels.values().cloned().collect())
}

pub fn lcl_verify(problem: &LclProblemJson, graph: &GraphJson, output: &LabelsJson) -> Result<Response> {
    let p = problem.to_problem()?;
    let g = graph.to_labeled()?;
    let out = output.to_labeling(&g)?;
    let v = verify_lcl_solution(&p, &g, &out)?;
    let json = json!({ "ok": v.is_ok(), "violations": v.violations, "witnesses": v.witnesses });
    let text = if v.is_ok() {
        "valid".to_string()
    } else {
        format!("invalid: nodes {:?} match no constraint", v.violations)
    };
    Ok(Response::new(v.is_ok(), json, text).with_dot(to_dot(&g, "input")))
}

/// Constraint set made of every radius-`radius` ball of `graph`.
pub fn lcl_balls(graph: &GraphJson, radius: usize, max_degree: usize) -> Result<Response> {
    let g = graph.to_labeled()?;
    let c = ConstraintSet::from_balls_of(&g, radius, max_degree)?;
    let text = format!("{} members of radius {radius}", c.len());
    Ok(Response::new(true, to_value(&ConstraintSetJson::from_set(&c)), text).with_dot(to_dot(&g, "input")))
}

fn local(name: &str, t: usize) -> Result<nslab_core::outcome::LocalAlgorithm> {
    local_algorithm(name, t).map_or_else(|| usage(format!("unknown algorithm {name:?}; known: {LOCAL_ALGORITHMS:?}")), Ok)
}

pub fn sim_local(graph: &GraphJson, algorithm: &str, t: usize) -> Result<Response> {
    let g = graph.to_labeled()?;
    let a = local(algorithm, t)?;
    let l = run_local(&a, &g)?;
    let labels = LabelsJson::from_labeling(&g, &l);
    let text = format!("node labels {:?}", l.nodes);
    Ok(Response::new(true, to_value(&labels), text).with_dot(to_dot(&LabeledGraph::new(g.graph.clone(), l)?, algorithm)))
}

/// Exact enumeration of every seed assignment, or `samples` draws from
/// `seed`.
pub fn sim_rand_local(graph: &GraphJson, algorithm: &str, t: usize, samples: Option<usize>, seed: u64) -> Result<Response> {
    let g = graph.to_labeled()?;
    let a = local(algorithm, t)?;
    let mode = match samples {
        None => SeedMode::Exact,
        Some(samples) => SeedMode::Sample { samples, seed },
    };
    let o = run_rand_local(&a, &g, mode)?;
    let text = format!("{} labelings in the support", o.len());
    Ok(Response::new(true, to_value(&OutcomeJson::from_outcome(&o)), text).with_dot(to_dot(&g, "input")))
}

pub fn sim_slocal(graph: &GraphJson, algorithm: &str, order: &[NodeId]) -> Result<Response> {
    let g = graph.to_labeled()?;
    let Some(a) = slocal_algorithm(algorithm) else {
        return usage(format!("unknown algorithm {algorithm:?}; known: {SLOCAL_ALGORITHMS:?}"));
    };
    let run = run_slocal(&a, &g, order)?;
    let json = json!({ "labels": LabelsJson::from_labeling(&g, &run.labeling), "locality": run.locality });
    let text = format!("locality {}", run.locality);
    Ok(Response::new(true, json, text).with_dot(to_dot(&LabeledGraph::new(g.graph.clone(), run.labeling)?, algorithm)))
}

pub fn ns_verify(g: &OutcomeJson, h: &OutcomeJson, ag: &[NodeId], ah: &[NodeId], t: usize) -> Result<Response> {
    let (og, oh) = (g.to_outcome()?, h.to_outcome()?);
    let v = verify_non_signaling(&og, &oh, ag, ah, t, DEFAULT_ISOMORPHISM_CAP)?;
    let json = json!({
        "ok": v.ok,
        "isomorphisms_checked": v.isomorphisms_checked,
        "exhaustive": v.exhaustive,
        "mismatch": v.mismatch,
    });
    let text = match &v.mismatch {
        None => format!("non-signaling under {} isomorphisms", v.isomorphisms_checked),
        Some(m) => format!("signaling: {m}"),
    };
    Ok(Response::new(v.ok, json, text))
}

/// The fractional matching LP of `graph`.
pub fn lp_build(graph: &GraphJson) -> Result<Response> {
    let lp = build_fractional_matching_lp(&graph.to_graph()?)?;
    let text = format!("{} variables, {} rows", lp.variables().len(), lp.rows().len());
    Ok(Response::new(true, to_value(&LpJson::from_lp(&lp)), text))
}

pub fn lp_opt(lp: &LpJson) -> Result<Response> {
    let p = lp.to_lp()?;
    let (json, text) = match exact_opt(&p) {
        LpOptimum::Optimal { value, point } => {
            let value = rational::format(&value);
            (json!({ "status": "optimal", "value": value, "point": point }), format!("optimum {value}"))
        }
        LpOptimum::Unbounded => (json!({ "status": "unbounded" }), "unbounded".to_string()),
        LpOptimum::Infeasible => (json!({ "status": "infeasible" }), "infeasible".to_string()),
    };
    Ok(Response::new(true, json, text))
}

pub fn lp_check(lp: &LpJson, point: &LpPoint) -> Result<Response> {
    let f = check_feasible(&lp.to_lp()?, point)?;
    let json = json!({ "ok": f.is_ok(), "violated_rows": f.violated_rows, "negative": f.negative });
    let text = if f.is_ok() {
        "feasible".to_string()
    } else {
        format!("infeasible: rows {:?}, negative {:?}", f.violated_rows, f.negative)
    };
    Ok(Response::new(f.is_ok(), json, text))
}

pub fn lp_ratio(lp: &LpJson, point: &LpPoint) -> Result<Response> {
    let p = lp.to_lp()?;
    let r = approximation_ratio(&p, point)?;
    let value = rational::format(&p.objective_value(point)?);
    let json = json!({ "ratio": r.to_string(), "objective": value });
    Ok(Response::new(true, json, format!("ratio {r} (objective {value})")))
}

pub fn lp_dequantize(lp: &LpJson, outcome: &OutcomeJson) -> Result<Response> {
    let p = lp.to_lp()?;
    let x = dequantize(&p, &outcome.to_outcome()?)?;
    let value = rational::format(&p.objective_value(&x)?);
    let json = json!({ "point": x, "objective": value });
    Ok(Response::new(true, json, format!("objective {value}")))
}

fn lin_problem(problem: Option<&LinearizableProblemJson>) -> Result<LinearizableProblem> {
    Ok(match problem {
        Some(p) => p.to_problem()?,
        None => LinearizableProblem::maximal_matching(),
    })
}

/// Verifies edge labels of an incidence graph; the maximal-matching
/// encoding is used when no problem is given.
pub fn lin_verify(
    problem: Option<&LinearizableProblemJson>,
    incidence: &GraphJson,
    labels: &BTreeMap<usize, String>,
) -> Result<Response> {
    let p = lin_problem(problem)?;
    let inc = incidence_from_json(incidence)?;
    let lab = dense_labels(labels, inc.graph.edge_count())?;
    let v = verify_linearizable(&p, &inc, &lab)?;
    let json = json!({
        "ok": v.is_ok(),
        "white_violations": v.white_violations,
        "black_violations": v.black_violations,
    });
    let text = if v.is_ok() {
        "valid".to_string()
    } else {
        format!("invalid: whites {:?}, blacks {:?}", v.white_violations, v.black_violations)
    };
    Ok(Response::new(v.is_ok(), json, text))
}

/// Labels for a maximal matching given as black indices.
pub fn lin_encode(incidence: &GraphJson, matching: &[usize]) -> Result<Response> {
    let inc = incidence_from_json(incidence)?;
    let lab = encode_matching(&inc, matching)?;
    let text = lab.join(" ");
    Ok(Response::new(true, to_value(&labels_by_edge(&lab)), text))
}

pub fn lin_decode(incidence: &GraphJson, labels: &BTreeMap<usize, String>) -> Result<Response> {
    let inc = incidence_from_json(incidence)?;
    let lab = dense_labels(labels, inc.graph.edge_count())?;
    let m = decode_to_matching(&inc, &lab)?;
    let text = format!("matched blacks {m:?}");
    Ok(Response::new(true, json!({ "matching": m }), text))
}

/// Greedy maximal matching of a plain graph in the given order, with its
/// encoding on the incidence graph.
pub fn lin_greedy(graph: &GraphJson, order: &[NodeId]) -> Result<Response> {
    let g = graph.to_graph()?;
    let run = run_slocal(&nslab_core::linearizable::GreedyMatching, &LabeledGraph::anonymous(g.clone()), order)?;
    let edges = greedy_matching_edges(&g, &run.states);
    let lab = incidence_labels(&g, &run.labeling)?;
    let json = json!({
        "matching": edges,
        "locality": run.locality,
        "incidence": incidence_to_json(&IncidenceGraph::from_graph(&g)),
        "labels": labels_by_edge(&lab),
    });
    let text = format!("matched edges {edges:?}, locality {}", run.locality);
    Ok(Response::new(true, json, text))
}

fn graph_response(g: &Graph, name: &str, extra: Value) -> Response {
    let mut json = json!({ "graph": GraphJson::from_graph(g) });
    if let (Value::Object(map), Value::Object(more)) = (&mut json, extra) {
        map.extend(more);
    }
    let text = format!("{name}: {} nodes, {} edges", g.node_count(), g.edge_count());
    Response::new(true, json, text).with_dot(to_dot(&LabeledGraph::anonymous(g.clone()), name))
}

pub fn gadget_tree(height: usize) -> Result<Response> {
    let t = gen_tree_like(height)?;
    Ok(graph_response(&t.graph, &format!("tree-like-{height}"), json!({ "coords": t.coords })))
}

/// `weights` lists port heights in `(i, j)` order.
pub fn gadget_octopus(x: usize, eta: &[usize], weights: &[usize]) -> Result<Response> {
    let index: Vec<(usize, usize)> = eta.iter().enumerate().flat_map(|(i, &e)| (1..=e).map(move |j| (i, j))).collect();
    if index.len() != weights.len() {
        return usage(format!("{} weights for {} ports", weights.len(), index.len()));
    }
    let o = gen_octopus(x, eta, &index.into_iter().zip(weights.iter().copied()).collect())?;
    let head = o.witness.head.nodes.clone();
    let ports: Vec<Value> =
        o.witness.ports.iter().map(|p| json!({ "i": p.i, "j": p.j, "nodes": p.gadget.nodes })).collect();
    Ok(graph_response(&o.graph, "octopus", json!({ "head": head, "ports": ports })))
}

pub fn lift_build(incidence: &GraphJson, k: Option<usize>) -> Result<Response> {
    let inc = incidence_from_json(incidence)?;
    let (pi, map) = gen_proper_instance(&inc, k)?;
    let text = format!("{} nodes, {} octopi, {} inter-octopus nodes", pi.graph.node_count(), pi.octopi.len(), pi.inter.len());
    let json = to_value(&ProperInstanceJson::from_instance(&pi, Some(&map)));
    Ok(Response::new(true, json, text).with_dot(proper_instance_dot(&pi, "proper-instance")))
}

/// Lifted greedy matching; the default order processes octopi by index.
pub fn lift_run(instance: &ProperInstanceJson, order: Option<&[usize]>) -> Result<Response> {
    let (pi, _) = instance.to_instance()?;
    let default: Vec<usize> = (0..pi.octopi.len()).collect();
    let run = lift_slocal_algorithm(&pi, order.unwrap_or(&default))?;
    let json = json!({
        "labels": run.labels,
        "locality_contracted": run.locality_hat,
        "locality": run.locality_g,
        "locality_bound": run.locality_bound,
    });
    let text = format!("locality {} (bound {})", run.locality_g, run.locality_bound);
    Ok(Response::new(true, json, text).with_dot(proper_instance_dot(&pi, "proper-instance")))
}

pub fn lift_pullback(instance: &ProperInstanceJson, source: &GraphJson, labels: &[String]) -> Result<Response> {
    let (_, map) = instance.to_instance()?;
    let Some(map) = map else {
        return usage("instance has no port map");
    };
    let inc = incidence_from_json(source)?;
    let lab = pullback_labeling(&map, &inc, labels)?;
    Ok(Response::new(true, to_value(&labels_by_edge(&lab)), lab.join(" ")))
}

pub fn lift_verify(instance: &ProperInstanceJson, labels: &[String], problem: Option<&LinearizableProblemJson>) -> Result<Response> {
    let (pi, _) = instance.to_instance()?;
    let p = lin_problem(problem)?;
    let v = verify_pi_promise(&pi, labels, &p)?;
    let json = json!({ "ok": v.is_ok(), "violations": v.violations });
    let text = if v.is_ok() { "valid".to_string() } else { v.violations.join("\n") };
    Ok(Response::new(v.is_ok(), json, text))
}

pub fn suite(name: &str, seed: u64, out: Option<&Path>) -> Result<Response> {
    if !SUITES.iter().any(|(n, _)| *n == name) {
        let known: Vec<&str> = SUITES.iter().map(|(n, _)| *n).collect();
        return usage(format!("unknown suite {name:?}; known: {known:?}"));
    }
    let (report, _) = run_suite(name, seed, out)?;
    Ok(Response::new(report.passed, to_value(&report), report.to_text().trim_end()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_labels_need_every_edge() {
        let full: BTreeMap<usize, String> = [(0, "M".to_string()), (1, "A".to_string())].into();
        assert_eq!(dense_labels(&full, 2).unwrap(), vec!["M", "A"]);
        assert!(dense_labels(&full, 3).is_err());
        let gap: BTreeMap<usize, String> = [(0, "M".to_string()), (2, "A".to_string())].into();
        assert!(dense_labels(&gap, 2).is_err());
    }
}
