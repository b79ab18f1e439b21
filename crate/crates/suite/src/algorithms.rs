//! Named sample algorithms, shared by the checks and the command line.

use std::sync::Arc;

use nslab_core::graph::{LabeledGraph, View, ANON};
use nslab_core::linearizable::GreedyMatching;
use nslab_core::lp::{build_fractional_matching_lp, labeling_from_point, maximal_matching_to_fractional, Oracle};
use nslab_core::outcome::{LocalAlgorithm, NodeOutput, Outcome};
use nslab_core::Result;

use crate::oracle::maximal_matchings;

/// Names accepted by [`local_algorithm`].
pub const LOCAL_ALGORITHMS: &[&str] = &["degree", "coin", "seed-census", "agreeing-seeds"];

/// Names accepted by [`slocal_algorithm`].
pub const SLOCAL_ALGORITHMS: &[&str] = &["greedy-matching"];

/// Looks up a LOCAL algorithm by name. `t` is the locality where the
/// algorithm has one; `agreeing-seeds` always uses one round.
pub fn local_algorithm(name: &str, t: usize) -> Option<LocalAlgorithm> {
    match name {
        "degree" => Some(degree(t)),
        "coin" => Some(coin()),
        "seed-census" => Some(seed_census(t)),
        "agreeing-seeds" => Some(agreeing_seeds()),
        _ => None,
    }
}

pub fn slocal_algorithm(name: &str) -> Option<GreedyMatching> {
    (name == "greedy-matching").then_some(GreedyMatching)
}

/// Node label is the anchor's degree; `t` only sets the view radius.
pub fn degree(t: usize) -> LocalAlgorithm {
    LocalAlgorithm::deterministic(format!("degree-{t}"), t, |view: &View| {
        let label = view.ports[view.anchor()].len().to_string();
        Ok(NodeOutput::uniform(view, &label, ANON))
    })
}

/// Zero rounds: every node outputs its own fair coin.
pub fn coin() -> LocalAlgorithm {
    LocalAlgorithm::randomized("coin", 0, vec!["0".into(), "1".into()], |view: &View, seeds: &[String]| {
        Ok(NodeOutput::uniform(view, &seeds[view.anchor()], ANON))
    })
}

/// Two seeds per node; the output counts the `1` seeds in the radius-`t`
/// ball and each port reports the seed across it.
pub fn seed_census(t: usize) -> LocalAlgorithm {
    LocalAlgorithm::randomized(format!("seed-census-{t}"), t, vec!["0".into(), "1".into()], |view: &View, seeds: &[String]| {
        let a = view.anchor();
        let ones = seeds.iter().filter(|s| *s == "1").count();
        let ports = view.ports[a]
            .iter()
            .map(|p| match p.edge {
                Some(e) => seeds[view.graph.graph.other(e, a)].clone(),
                None => "-".to_string(),
            })
            .collect();
        Ok(NodeOutput::new(format!("{}:{ones}", seeds[a]), ports))
    })
}

/// One round, two seeds: an edge gets `1/2` when its endpoints drew the
/// same seed and `0` otherwise.
pub fn agreeing_seeds() -> LocalAlgorithm {
    LocalAlgorithm::randomized("agreeing-seeds", 1, vec!["0".into(), "1".into()], |view: &View, seeds: &[String]| {
        let a = view.anchor();
        let ports = view.ports[a]
            .iter()
            .map(|p| {
                let e = p.edge.expect("radius 1 keeps the anchor's edges");
                let u = view.graph.graph.other(e, a);
                if seeds[u] == seeds[a] { "1/2" } else { "0" }.to_string()
            })
            .collect();
        Ok(NodeOutput::new(ANON, ports))
    })
}

/// Uniform distribution over the maximal matchings of the input, written
/// as matching-LP labels.
pub fn uniform_maximal_matching_oracle() -> Oracle {
    Arc::new(|g: &LabeledGraph| {
        let lp = build_fractional_matching_lp(&g.graph)?;
        let labelings = maximal_matchings(&g.graph)
            .iter()
            .map(|m| labeling_from_point(&lp, &maximal_matching_to_fractional(&g.graph, m)?))
            .collect::<Result<Vec<_>>>()?;
        Outcome::uniform(g.clone(), labelings)
    })
}
