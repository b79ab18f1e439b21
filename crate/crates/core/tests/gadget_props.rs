use nslab_core::gadgets::{
    family_constraints, family_labeling, gen_proper_instance, gen_tree_like, lift_slocal_algorithm, pullback_labeling,
    recognize_proper_instance, recognize_tree_like, verify_pi_promise, verify_witness, ProperInstanceJson,
};
use nslab_core::graph::Graph;
use nslab_core::lcl::check_constraints;
use nslab_core::linearizable::{decode_to_matching, is_maximal_matching, verify_linearizable, IncidenceGraph, LinearizableProblem};
use proptest::prelude::*;

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
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
            Graph::new(n, edges).unwrap()
        })
    })
}

#[test]
fn tree_like_gadgets_round_trip() {
    for h in 1..=7 {
        let t = gen_tree_like(h).unwrap();
        assert_eq!(t.graph.node_count(), (1 << h) - 1);
        let back = recognize_tree_like(&t.graph).unwrap();
        assert_eq!(back.height, h);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn proper_instances_round_trip_and_obey_the_size_law(g in arb_graph(6)) {
        let inc = IncidenceGraph::from_graph(&g);
        let (pi, map) = gen_proper_instance(&inc, None).unwrap();
        let n = inc.graph.node_count();
        let big_n = pi.graph.node_count();
        if n >= 2 {
            prop_assert!(n <= big_n && big_n <= n * n * n);
        }
        let r = recognize_proper_instance(&pi.graph).unwrap().expect("generated instances are proper");
        prop_assert!(verify_witness(&pi.graph, &r.octopi, &r.inter).is_ok());
        prop_assert_eq!(r.octopi.len(), pi.octopi.len());
        prop_assert_eq!(r.inter.len(), pi.inter.len());

        let json = serde_json::to_string(&ProperInstanceJson::from_instance(&pi, Some(&map))).unwrap();
        let (back, back_map) = serde_json::from_str::<ProperInstanceJson>(&json).unwrap().to_instance().unwrap();
        prop_assert_eq!(back, pi);
        prop_assert_eq!(back_map, Some(map));
    }

    #[test]
    fn valid_promise_labelings_pull_back_to_valid_encodings(
        g in arb_graph(5),
        keys in proptest::collection::vec(any::<u32>(), 5),
    ) {
        let inc = IncidenceGraph::from_graph(&g);
        let (pi, map) = gen_proper_instance(&inc, None).unwrap();
        let n = g.node_count();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| (keys[v], v));
        let run = lift_slocal_algorithm(&pi, &order).unwrap();
        prop_assert_eq!(run.locality_hat, 1);
        prop_assert!(run.locality_g <= run.locality_bound);
        let p = LinearizableProblem::maximal_matching();
        prop_assert!(verify_pi_promise(&pi, &run.labels, &p).unwrap().is_ok());
        let back = pullback_labeling(&map, &inc, &run.labels).unwrap();
        prop_assert!(verify_linearizable(&p, &inc, &back).unwrap().is_ok());
        let m = decode_to_matching(&inc, &back).unwrap();
        prop_assert!(is_maximal_matching(&g, &m).is_none());
    }

    #[test]
    fn family_labelings_satisfy_the_family_constraints(g in arb_graph(4)) {
        let inc = IncidenceGraph::from_graph(&g);
        let (pi, _) = gen_proper_instance(&inc, None).unwrap();
        prop_assert!(check_constraints(family_labeling(&pi), family_constraints()).unwrap().is_ok());
        prop_assert!(!family_constraints().is_empty());
    }
}
