use std::collections::BTreeSet;

use nslab_core::graph::{extract_view, views_isomorphic, Graph, Isomorphism, LabeledGraph, Labeling, View};
use proptest::prelude::*;

/// A labeled graph on `1..=max_n` nodes with node labels from {a, b} and
/// half-edge labels from {x, y}.
fn arb_labeled(max_n: usize) -> impl Strategy<Value = LabeledGraph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        (
            proptest::collection::vec(any::<bool>(), pairs),
            proptest::collection::vec(any::<bool>(), n),
            proptest::collection::vec(any::<bool>(), 2 * pairs),
        )
            .prop_map(move |(bits, nl, hl)| {
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
                let pick = |b: bool, t: &str, f: &str| if b { t } else { f }.to_string();
                let labels = Labeling {
                    nodes: nl.iter().map(|&b| pick(b, "a", "b")).collect(),
                    half_edges: (0..g.edge_count()).map(|e| [pick(hl[2 * e], "x", "y"), pick(hl[2 * e + 1], "x", "y")]).collect(),
                };
                LabeledGraph::new(g, labels).unwrap()
            })
    })
}

/// Renames node `v` to `perm[v]`, keeping edge ids and endpoint order.
fn relabel(g: &LabeledGraph, perm: &[usize]) -> LabeledGraph {
    let n = g.graph.node_count();
    let edges = g.graph.edges().iter().map(|&(a, b)| (perm[a], perm[b])).collect();
    let graph = Graph::new(n, edges).unwrap();
    let mut nodes = vec![String::new(); n];
    for v in 0..n {
        nodes[perm[v]] = g.labels.nodes[v].clone();
    }
    LabeledGraph::new(graph, Labeling { nodes, half_edges: g.labels.half_edges.clone() }).unwrap()
}

/// Checks that `phi` maps `a` onto `b` preserving anchors, adjacency and labels.
fn respects(phi: &Isomorphism, a: &View, b: &View) -> bool {
    let (ga, gb) = (&a.graph, &b.graph);
    (0..ga.graph.node_count()).all(|u| {
        ga.node_label(u) == gb.node_label(phi.nodes[u]) && a.is_anchor(u) == b.is_anchor(phi.nodes[u])
    }) && (0..ga.graph.edge_count()).all(|e| {
        let (x, y) = ga.graph.endpoints(e);
        let f = phi.edges[e];
        let (p, q) = gb.graph.endpoints(f);
        let ends = BTreeSet::from([phi.nodes[x], phi.nodes[y]]);
        ends == BTreeSet::from([p, q])
            && ga.half_edge_label(x, e) == gb.half_edge_label(phi.nodes[x], f)
            && ga.half_edge_label(y, e) == gb.half_edge_label(phi.nodes[y], f)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn views_grow_with_the_radius(g in arb_labeled(7), seed in any::<u64>(), t in 0usize..3) {
        let n = g.graph.node_count();
        let anchors: Vec<usize> = (0..n).filter(|v| (seed >> v) & 1 == 1).collect();
        let anchors = if anchors.is_empty() { vec![0] } else { anchors };
        let small: BTreeSet<_> = extract_view(&g, &anchors, t).unwrap().origin_nodes.into_iter().collect();
        let big: BTreeSet<_> = extract_view(&g, &anchors, t + 1).unwrap().origin_nodes.into_iter().collect();
        prop_assert!(small.is_subset(&big));
    }

    #[test]
    fn view_isomorphism_is_reflexive_and_symmetric(
        g in arb_labeled(6),
        shuffle in any::<proptest::sample::Index>(),
        v in any::<proptest::sample::Index>(),
        t in 0usize..3,
    ) {
        let n = g.graph.node_count();
        let mut perm: Vec<usize> = (0..n).collect();
        let k = shuffle.index(n);
        perm.rotate_left(k);
        let h = relabel(&g, &perm);
        let v = v.index(n);
        let a = extract_view(&g, &[v], t).unwrap();
        let b = extract_view(&h, &[perm[v]], t).unwrap();
        let id = views_isomorphic(&a, &a);
        prop_assert!(id.is_some_and(|phi| respects(&phi, &a, &a)));
        let phi = views_isomorphic(&a, &b);
        prop_assert!(phi.is_some());
        let phi = phi.unwrap();
        prop_assert!(respects(&phi, &a, &b));
        prop_assert!(respects(&phi.inverse(), &b, &a));
        prop_assert!(views_isomorphic(&b, &a).is_some());
    }

    #[test]
    fn neighborhoods_match_stepwise_expansion(g in arb_labeled(8), seed in any::<u64>(), t in 0usize..4) {
        let n = g.graph.node_count();
        let anchors: Vec<usize> = (0..n).filter(|v| (seed >> (v + 8)) & 1 == 1).collect();
        let mut reached: BTreeSet<usize> = anchors.iter().copied().collect();
        for _ in 0..t {
            let next: Vec<usize> = reached.iter().flat_map(|&u| g.graph.neighbors(u).collect::<Vec<_>>()).collect();
            reached.extend(next);
        }
        prop_assert_eq!(g.graph.neighborhood(&anchors, t).unwrap(), reached);
    }
}
