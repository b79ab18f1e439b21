//! Brute-force certification of the non-signaling condition for one pair
//! of anchor sets.

use std::collections::BTreeMap;

use super::{Outcome, PartialLabeling, RestrictedOutcome};
use crate::error::{Error, Result};
use crate::graph::{all_view_isomorphisms, extract_view, views_isomorphic, Isomorphism, NodeId, View};
use crate::rational::{self, Rational};

/// Default number of view isomorphisms checked per call.
pub const DEFAULT_ISOMORPHISM_CAP: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonSignalingVerdict {
    pub ok: bool,
    /// View isomorphisms under which the marginals were compared.
    pub isomorphisms_checked: usize,
    /// Whether every isomorphism was checked (false when the cap was hit).
    pub exhaustive: bool,
    /// Human-readable description of the first mismatch.
    pub mismatch: Option<String>,
}

/// Compares the marginals of `o_g` on `a_g` and `o_h` on `a_h` under every
/// isomorphism of the radius-`t` views (up to `cap`).
///
/// Fails with [`Error::Precondition`] when the radius-0 or radius-`t` views
/// are not isomorphic.
pub fn verify_non_signaling(
    o_g: &Outcome,
    o_h: &Outcome,
    a_g: &[NodeId],
    a_h: &[NodeId],
    t: usize,
    cap: usize,
) -> Result<NonSignalingVerdict> {
    let (g, h) = (o_g.input(), o_h.input());
    if views_isomorphic(&extract_view(g, a_g, 0)?, &extract_view(h, a_h, 0)?).is_none() {
        return Err(Error::Precondition("radius-0 views are not isomorphic".into()));
    }
    let (vg, vh) = (extract_view(g, a_g, t)?, extract_view(h, a_h, t)?);
    if views_isomorphic(&vg, &vh).is_none() {
        return Err(Error::Precondition(format!("radius-{t} views are not isomorphic")));
    }
    let rg = o_g.restrict(a_g)?;
    let rh = o_h.restrict(a_h)?;

    let mut mismatch = None;
    let (count, complete) = all_view_isomorphisms(&vg, &vh, cap.max(1), |phi| {
        let transported = transport(&rg, &rh, &vg, &vh, phi, t);
        let target = if t == 0 { canonical_dangling(&rh) } else { rh.support.clone() };
        if transported != target {
            mismatch = Some(describe(&transported, &target));
            return false;
        }
        true
    });
    let ok = mismatch.is_none();
    Ok(NonSignalingVerdict { ok, isomorphisms_checked: count, exhaustive: complete || !ok, mismatch })
}

/// Rewrites the support of `rg` in the coordinates of `rh` via `phi`.
fn transport(
    rg: &RestrictedOutcome,
    rh: &RestrictedOutcome,
    vg: &View,
    vh: &View,
    phi: &Isomorphism,
    t: usize,
) -> BTreeMap<PartialLabeling, Rational> {
    let map_node = |v: NodeId| vh.origin_nodes[phi.nodes[vg.local(v).expect("anchor is in its view")]];
    // Position in `rg` of each scope node of `rh`.
    let node_pos: Vec<usize> = rh
        .nodes
        .iter()
        .map(|&target| rg.nodes.iter().position(|&v| map_node(v) == target).expect("phi maps anchors onto anchors"))
        .collect();

    if t == 0 {
        // No edges are visible: compare the multiset of labels at each node.
        let mut out = BTreeMap::new();
        for (l, p) in &rg.support {
            let mut halves = Vec::new();
            for &i in &node_pos {
                halves.extend(sorted_halves(rg, l, rg.nodes[i]));
            }
            let nodes = node_pos.iter().map(|&i| l.nodes[i].clone()).collect();
            *out.entry(PartialLabeling { nodes, half_edges: halves }).or_insert_with(rational::zero) += p;
        }
        return out;
    }

    let edge_in_h: BTreeMap<usize, usize> = vg
        .origin_edges
        .iter()
        .enumerate()
        .map(|(local, &src)| (src, vh.origin_edges[phi.edges[local]]))
        .collect();
    let half_pos: Vec<usize> = rh
        .half_edges
        .iter()
        .map(|target| {
            rg.half_edges
                .iter()
                .position(|h| map_node(h.node) == target.node && edge_in_h[&h.edge] == target.edge)
                .expect("anchor edges are inside views of radius at least 1")
        })
        .collect();
    let mut out = BTreeMap::new();
    for (l, p) in &rg.support {
        let key = PartialLabeling {
            nodes: node_pos.iter().map(|&i| l.nodes[i].clone()).collect(),
            half_edges: half_pos.iter().map(|&i| l.half_edges[i].clone()).collect(),
        };
        *out.entry(key).or_insert_with(rational::zero) += p;
    }
    out
}

fn sorted_halves(r: &RestrictedOutcome, l: &PartialLabeling, v: NodeId) -> Vec<String> {
    let mut labels: Vec<String> =
        r.half_edges.iter().zip(&l.half_edges).filter(|(h, _)| h.node == v).map(|(_, x)| x.clone()).collect();
    labels.sort();
    labels
}

fn canonical_dangling(r: &RestrictedOutcome) -> BTreeMap<PartialLabeling, Rational> {
    let mut out = BTreeMap::new();
    for (l, p) in &r.support {
        let half_edges = r.nodes.iter().flat_map(|&v| sorted_halves(r, l, v)).collect();
        *out.entry(PartialLabeling { nodes: l.nodes.clone(), half_edges }).or_insert_with(rational::zero) += p;
    }
    out
}

fn describe(a: &BTreeMap<PartialLabeling, Rational>, b: &BTreeMap<PartialLabeling, Rational>) -> String {
    let show = |m: &BTreeMap<PartialLabeling, Rational>| {
        m.iter()
            .map(|(l, p)| format!("{:?}/{:?}:{}", l.nodes, l.half_edges, rational::format(p)))
            .collect::<Vec<_>>()
            .join(", ")
    };
    format!("G side [{}] vs H side [{}]", show(a), show(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Graph, LabeledGraph, Labeling};
    use crate::outcome::{run_rand_local, LocalAlgorithm, NodeOutput, SeedMode};

    fn parity(n: usize) -> Outcome {
        let g = LabeledGraph::anonymous(Graph::cycle(n));
        let l = Labeling::uniform(&g.graph, &(n % 2).to_string(), "_");
        Outcome::deterministic(g, l).unwrap()
    }

    #[test]
    fn identity_pair_is_ok() {
        let o = parity(5);
        let v = verify_non_signaling(&o, &o, &[0], &[0], 1, DEFAULT_ISOMORPHISM_CAP).unwrap();
        assert!(v.ok);
        assert!(v.exhaustive);
        assert_eq!(v.isomorphisms_checked, 2);
    }

    #[test]
    fn size_parity_signals() {
        let v = verify_non_signaling(&parity(4), &parity(5), &[0], &[0], 1, DEFAULT_ISOMORPHISM_CAP).unwrap();
        assert!(!v.ok);
        assert!(v.mismatch.is_some());
    }

    #[test]
    fn non_isomorphic_views_are_a_precondition_failure() {
        let a = parity(4);
        let b = Outcome::deterministic(
            LabeledGraph::anonymous(Graph::path(3)),
            Labeling::uniform(&Graph::path(3), "0", "_"),
        )
        .unwrap();
        let err = verify_non_signaling(&a, &b, &[0], &[0], 1, 10).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn seeded_local_outcome_passes() {
        // Edge label: whether the own seed exceeds the neighbor's.
        let a = LocalAlgorithm::randomized("bigger", 1, vec!["0".into(), "1".into()], |view, seeds| {
            let me = view.anchor();
            let ports = view.ports[me]
                .iter()
                .map(|p| {
                    let e = p.edge.expect("radius 1 keeps anchor edges");
                    let other = view.graph.graph.other(e, me);
                    (seeds[me] > seeds[other]).to_string()
                })
                .collect();
            Ok(NodeOutput::new(seeds[me].clone(), ports))
        });
        let og = run_rand_local(&a, &LabeledGraph::anonymous(Graph::cycle(4)), SeedMode::Exact).unwrap();
        let oh = run_rand_local(&a, &LabeledGraph::anonymous(Graph::path(6)), SeedMode::Exact).unwrap();
        let v = verify_non_signaling(&og, &oh, &[1], &[2], 1, DEFAULT_ISOMORPHISM_CAP).unwrap();
        assert!(v.ok, "{:?}", v.mismatch);
        let v0 = verify_non_signaling(&og, &oh, &[1], &[2], 0, DEFAULT_ISOMORPHISM_CAP).unwrap();
        assert!(v0.ok, "{:?}", v0.mismatch);
    }
}
