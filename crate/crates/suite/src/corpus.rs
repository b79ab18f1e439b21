//! Graph corpora: every graph up to isomorphism on a few nodes, and seeded
//! random graphs and incidence graphs.

use std::collections::BTreeSet;

use nslab_core::graph::{EdgeId, Graph, NodeId};
use nslab_core::linearizable::{IncidenceGraph, Role};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Largest node count supported by [`graphs_up_to_iso`].
pub const MAX_ENUMERATED_NODES: usize = 8;

/// Bit of pair `(u, v)`, `u < v`, in an upper-triangle code.
fn pair_bit(n: usize, u: usize, v: usize) -> u32 {
    (u * (2 * n - u - 1) / 2 + (v - u - 1)) as u32
}

fn code_of(n: usize, adj: &[u32], perm: &[usize]) -> u64 {
    let mut code = 0u64;
    for u in 0..n {
        for v in u + 1..n {
            if adj[perm[u]] >> perm[v] & 1 == 1 {
                code |= 1 << pair_bit(n, u, v);
            }
        }
    }
    code
}

/// Largest code over the orderings that list nodes by decreasing degree;
/// any isomorphism preserves degrees, so this is a canonical form.
fn canonical_code(n: usize, adj: &[u32]) -> u64 {
    let degree = |v: usize| adj[v].count_ones();
    let mut nodes: Vec<usize> = (0..n).collect();
    nodes.sort_by_key(|&v| std::cmp::Reverse(degree(v)));
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for v in nodes {
        match classes.last_mut() {
            Some(c) if degree(c[0]) == degree(v) => c.push(v),
            _ => classes.push(vec![v]),
        }
    }
    let mut best = 0;
    let mut perm = Vec::with_capacity(n);
    search(&classes, 0, &mut perm, n, adj, &mut best);
    best
}

fn search(classes: &[Vec<usize>], i: usize, perm: &mut Vec<usize>, n: usize, adj: &[u32], best: &mut u64) {
    if i == classes.len() {
        *best = (*best).max(code_of(n, adj, perm));
        return;
    }
    let class = &classes[i];
    let mut order = class.clone();
    permute(&mut order, 0, &mut |o| {
        let base = perm.len();
        perm.extend_from_slice(o);
        search(classes, i + 1, perm, n, adj, best);
        perm.truncate(base);
    });
}

fn permute(items: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

fn graph_from_code(n: usize, code: u64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if code >> pair_bit(n, u, v) & 1 == 1 {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges).expect("codes describe simple graphs")
}

/// One representative per isomorphism class of simple graphs on `n`
/// nodes, in increasing canonical-code order.
pub fn graphs_up_to_iso(n: usize) -> Vec<Graph> {
    assert!(n <= MAX_ENUMERATED_NODES, "enumeration is limited to {MAX_ENUMERATED_NODES} nodes");
    if n == 0 {
        return vec![Graph::new(0, vec![]).expect("empty graph")];
    }
    let mut codes = BTreeSet::from([0u64]);
    for size in 2..=n {
        let mut next = BTreeSet::new();
        for &code in &codes {
            let g = graph_from_code(size - 1, code);
            let mut adj = vec![0u32; size];
            for &(a, b) in g.edges() {
                adj[a] |= 1 << b;
                adj[b] |= 1 << a;
            }
            for subset in 0u32..1 << (size - 1) {
                let mut a = adj.clone();
                a[size - 1] = subset;
                for (u, row) in a.iter_mut().enumerate().take(size - 1) {
                    if subset >> u & 1 == 1 {
                        *row |= 1 << (size - 1);
                    }
                }
                next.insert(canonical_code(size, &a));
            }
        }
        codes = next;
    }
    codes.into_iter().map(|c| graph_from_code(n, c)).collect()
}

/// Connected representatives on `n` nodes.
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    graphs_up_to_iso(n).into_iter().filter(Graph::is_connected).collect()
}

/// `G(n, 1/2)`.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(0.5) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges).expect("random graphs are simple")
}

/// A random incidence graph: `1..=max_whites` whites, `1..=max_blacks`
/// blacks, each black joined to `1..=3` distinct whites, white edge orders
/// shuffled.
pub fn random_incidence(rng: &mut ChaCha8Rng, max_whites: usize, max_blacks: usize) -> IncidenceGraph {
    let whites = rng.gen_range(1..=max_whites);
    let blacks = rng.gen_range(1..=max_blacks);
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    let mut black_rows = Vec::with_capacity(blacks);
    for b in 0..blacks {
        let size = rng.gen_range(1..=whites.min(3));
        let mut members: Vec<NodeId> = (0..whites).collect();
        members.shuffle(rng);
        members.truncate(size);
        members.sort_unstable();
        let mut row = Vec::with_capacity(size);
        for w in members {
            row.push(edges.len());
            edges.push((w, whites + b));
        }
        black_rows.push(row);
    }
    let mut adjacency: Vec<Vec<EdgeId>> = vec![Vec::new(); whites];
    for (e, &(w, _)) in edges.iter().enumerate() {
        adjacency[w].push(e);
    }
    for row in adjacency.iter_mut() {
        row.shuffle(rng);
    }
    adjacency.extend(black_rows);
    let graph = Graph::with_adjacency(whites + blacks, false, edges, adjacency).expect("distinct members");
    let mut roles = vec![Role::White; whites];
    roles.extend(std::iter::repeat_n(Role::Black, blacks));
    IncidenceGraph::new(graph, roles).expect("edges join whites to blacks")
}

/// A uniformly random processing order of `n` nodes.
pub fn random_order(rng: &mut ChaCha8Rng, n: usize) -> Vec<NodeId> {
    let mut order: Vec<NodeId> = (0..n).collect();
    order.shuffle(rng);
    order
}
