use nslab_core::graph::{Graph, LabeledGraph, Labeling};
use nslab_core::outcome::Outcome;
use nslab_core::rational::{self, one, ratio, zero, Rational};
use proptest::prelude::*;

/// Up to four labelings over {0, 1, 2} on a random graph, random weights.
fn arb_outcome() -> impl Strategy<Value = Outcome> {
    (1usize..=5).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        (
            proptest::collection::vec(any::<bool>(), pairs),
            proptest::collection::vec((proptest::collection::vec(0u8..3, n + 2 * pairs), 1i64..10), 1..=4),
        )
            .prop_map(move |(bits, entries)| {
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
                let m = g.edge_count();
                let total: i64 = entries.iter().map(|e| e.1).sum();
                let support = entries.into_iter().map(|(labels, w)| {
                    let s = |i: usize| labels[i].to_string();
                    let l = Labeling {
                        nodes: (0..n).map(s).collect(),
                        half_edges: (0..m).map(|e| [s(n + 2 * e), s(n + 2 * e + 1)]).collect(),
                    };
                    (l, ratio(w, total))
                });
                Outcome::new(LabeledGraph::anonymous(g), support).unwrap()
            })
    })
}

fn subset(n: usize, mask: u64) -> Vec<usize> {
    (0..n).filter(|v| mask >> v & 1 == 1).collect()
}

proptest! {
    #[test]
    fn marginals_form_a_tower(o in arb_outcome(), outer in any::<u64>(), inner in any::<u64>()) {
        let n = o.input().graph.node_count();
        let s = subset(n, outer);
        let s2 = subset(n, outer & inner);
        let two_step = o.restrict(&s).unwrap().restrict(&s2).unwrap();
        prop_assert_eq!(two_step, o.restrict(&s2).unwrap());
        prop_assert_eq!(o.restrict(&s).unwrap().total(), one());
    }

    #[test]
    fn marginal_expectations_agree(o in arb_outcome(), mask in any::<u64>()) {
        let g = o.input().graph.clone();
        let s = subset(g.node_count(), mask);
        let full = o.expectation(rational::parse).unwrap();
        let r = o.restrict(&s).unwrap();
        let (nodes, halves) = r.expectation(rational::parse).unwrap();
        for (i, &v) in r.nodes.iter().enumerate() {
            prop_assert_eq!(&nodes[i], &full.nodes[v]);
        }
        for (i, h) in r.half_edges.iter().enumerate() {
            prop_assert_eq!(&halves[i], &full.half_edges[h.edge][g.side(h.node, h.edge)]);
        }
    }

    #[test]
    fn success_probability_complements(o in arb_outcome(), pick in 0u8..3) {
        let accept = |l: &Labeling| l.nodes.iter().filter(|x| x.as_str() == pick.to_string()).count() % 2 == 0;
        let p: Rational = o.success_probability(accept);
        let q = o.success_probability(|l| !accept(l));
        prop_assert!(p >= zero() && p <= one());
        prop_assert_eq!(p + q, one());
    }
}
