use std::collections::BTreeSet;

use nslab_core::graph::{centered_isomorphic, Graph, LabeledGraph, Labeling};
use nslab_core::lcl::{centered_ball, check_constraints, ConstraintSet};
use proptest::prelude::*;

fn alphabet(a: &[&str]) -> BTreeSet<String> {
    a.iter().map(|s| s.to_string()).collect()
}

fn arb_labeled(max_n: usize) -> impl Strategy<Value = LabeledGraph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        (proptest::collection::vec(any::<bool>(), pairs), proptest::collection::vec(any::<bool>(), n + 2 * pairs)).prop_map(
            move |(bits, labels)| {
                let mut edges = Vec::new();
                let mut k = 0;
                for u in 0..n {
                    for v in u + 1..n {
                        if bits[k] {
                            edges.push((u, v));
                        }
                        k += 1;
                    }
                }
                let g = Graph::new(n, edges).unwrap();
                let l = |i: usize, t: &str, f: &str| if labels[i] { t } else { f }.to_string();
                let labeling = Labeling {
                    nodes: (0..n).map(|v| l(v, "a", "b")).collect(),
                    half_edges: (0..g.edge_count()).map(|e| [l(n + 2 * e, "x", "y"), l(n + 2 * e + 1, "x", "y")]).collect(),
                };
                LabeledGraph::with_alphabets(g, labeling, alphabet(&["a", "b"]), alphabet(&["x", "y"])).unwrap()
            },
        )
    })
}

fn closure(gs: &[&LabeledGraph]) -> ConstraintSet {
    let mut c = ConstraintSet::empty(1, 8, alphabet(&["a", "b"]), alphabet(&["x", "y"]));
    for g in gs {
        c.absorb(g).unwrap();
    }
    c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn a_graph_satisfies_its_own_balls(g in arb_labeled(6)) {
        prop_assert!(check_constraints(&g, &closure(&[&g])).unwrap().is_ok());
    }

    #[test]
    fn witnesses_are_isomorphic_to_the_balls(g in arb_labeled(6), h in arb_labeled(6)) {
        let c = closure(&[&h]);
        let verdict = check_constraints(&g, &c).unwrap();
        for (v, w) in verdict.witnesses.iter().enumerate() {
            if let Some(w) = w {
                let ball = centered_ball(&g, v, 1).unwrap();
                prop_assert!(centered_isomorphic(&ball, &c.members()[*w]).is_some());
            }
        }
    }

    #[test]
    fn enlarging_the_constraints_never_adds_violations(g in arb_labeled(6), h in arb_labeled(6), k in arb_labeled(6)) {
        let small = check_constraints(&g, &closure(&[&h])).unwrap();
        let big = check_constraints(&g, &closure(&[&h, &k])).unwrap();
        let small_bad: BTreeSet<_> = small.violations.iter().collect();
        prop_assert!(big.violations.iter().all(|v| small_bad.contains(v)));
    }

    #[test]
    fn verdicts_are_deterministic(g in arb_labeled(6), h in arb_labeled(6)) {
        let c = closure(&[&h]);
        prop_assert_eq!(check_constraints(&g, &c).unwrap(), check_constraints(&g, &c).unwrap());
    }
}
