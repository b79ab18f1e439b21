use std::collections::BTreeSet;

use itertools::Itertools;
use nslab_core::graph::Graph;
use nslab_suite::corpus::{connected_graphs, graphs_up_to_iso, random_graph, random_incidence};
use nslab_suite::oracle::{is_bipartite, maximum_matching_size};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Smallest edge set over all relabelings: a canonical form by brute force.
fn brute_canonical(g: &Graph) -> Vec<(usize, usize)> {
    let n = g.node_count();
    (0..n)
        .permutations(n)
        .map(|p| {
            let mut e: Vec<(usize, usize)> =
                g.edges().iter().map(|&(a, b)| (p[a].min(p[b]), p[a].max(p[b]))).collect();
            e.sort_unstable();
            e
        })
        .min()
        .unwrap_or_default()
}

#[test]
fn class_counts_match_the_known_sequence() {
    let counts: Vec<usize> = (1..=7).map(|n| graphs_up_to_iso(n).len()).collect();
    assert_eq!(counts, vec![1, 2, 4, 11, 34, 156, 1044]);
    let connected: Vec<usize> = (1..=6).map(|n| connected_graphs(n).len()).collect();
    assert_eq!(connected, vec![1, 1, 2, 6, 21, 112]);
}

#[test]
fn representatives_are_pairwise_non_isomorphic_and_exhaustive() {
    for n in 1..=5 {
        let reps: BTreeSet<_> = graphs_up_to_iso(n).iter().map(brute_canonical).collect();
        assert_eq!(reps.len(), graphs_up_to_iso(n).len());
        // Every labeled graph on n nodes falls in one of the classes.
        let pairs: Vec<(usize, usize)> = (0..n).tuple_combinations().collect();
        for mask in 0u32..1 << pairs.len() {
            let edges = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect();
            assert!(reps.contains(&brute_canonical(&Graph::new(n, edges).unwrap())));
        }
    }
}

#[test]
fn random_incidence_graphs_are_well_formed() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let inc = random_incidence(&mut rng, 6, 6);
        assert!((1..=6).contains(&inc.whites.len()));
        assert!((1..=6).contains(&inc.blacks.len()));
        for &b in &inc.blacks {
            assert!((1..=3).contains(&inc.graph.degree(b)));
        }
    }
}

proptest! {
    #[test]
    fn bipartite_matchings_fit_the_smaller_side(seed in any::<u64>(), n in 1usize..=8) {
        let g = random_graph(&mut ChaCha8Rng::seed_from_u64(seed), n);
        let m = maximum_matching_size(&g);
        prop_assert!(2 * m <= n);
        if is_bipartite(&g) {
            let side = g.bipartition().unwrap();
            let smaller = side.iter().filter(|&&s| s).count().min(side.iter().filter(|&&s| !s).count());
            prop_assert!(m <= smaller);
        }
    }
}
