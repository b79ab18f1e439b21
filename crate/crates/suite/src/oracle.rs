//! Brute-force reference computations, written without the library's
//! algorithms so the criteria compare two independent routes.

use nslab_core::graph::{EdgeId, Graph};

/// Every matching of `g`, each as ascending edge ids.
pub fn matchings(g: &Graph) -> Vec<Vec<EdgeId>> {
    fn go(g: &Graph, e: EdgeId, used: &mut Vec<bool>, cur: &mut Vec<EdgeId>, out: &mut Vec<Vec<EdgeId>>) {
        if e == g.edge_count() {
            out.push(cur.clone());
            return;
        }
        go(g, e + 1, used, cur, out);
        let (a, b) = g.endpoints(e);
        if a != b && !used[a] && !used[b] {
            used[a] = true;
            used[b] = true;
            cur.push(e);
            go(g, e + 1, used, cur, out);
            cur.pop();
            used[a] = false;
            used[b] = false;
        }
    }
    let mut out = Vec::new();
    go(g, 0, &mut vec![false; g.node_count()], &mut Vec::new(), &mut out);
    out
}

/// Matchings to which no edge can be added.
pub fn maximal_matchings(g: &Graph) -> Vec<Vec<EdgeId>> {
    matchings(g)
        .into_iter()
        .filter(|m| {
            let mut covered = vec![false; g.node_count()];
            for &e in m {
                let (a, b) = g.endpoints(e);
                covered[a] = true;
                covered[b] = true;
            }
            g.edges().iter().all(|&(a, b)| covered[a] || covered[b])
        })
        .collect()
}

/// Size of a maximum matching.
pub fn maximum_matching_size(g: &Graph) -> usize {
    fn go(g: &Graph, v: usize, used: &mut Vec<bool>) -> usize {
        let n = g.node_count();
        let Some(v) = (v..n).find(|&u| !used[u]) else {
            return 0;
        };
        used[v] = true;
        let mut best = go(g, v + 1, used);
        let neighbors: Vec<usize> = g.neighbors(v).filter(|&u| !used[u]).collect();
        for u in neighbors {
            used[u] = true;
            best = best.max(1 + go(g, v + 1, used));
            used[u] = false;
        }
        used[v] = false;
        best
    }
    go(g, 0, &mut vec![false; g.node_count()])
}

/// Whether `g` has no odd cycle, by 2-coloring each component.
pub fn is_bipartite(g: &Graph) -> bool {
    let mut color: Vec<Option<bool>> = vec![None; g.node_count()];
    for s in 0..g.node_count() {
        if color[s].is_some() {
            continue;
        }
        color[s] = Some(false);
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            let c = color[v].expect("colored before push");
            for u in g.neighbors(v) {
                match color[u] {
                    None => {
                        color[u] = Some(!c);
                        stack.push(u);
                    }
                    Some(cu) if cu == c => return false,
                    Some(_) => {}
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matching_counts_on_small_graphs() {
        // Matchings of P4: {}, 3 singles, {e0, e2}.
        assert_eq!(matchings(&Graph::path(4)).len(), 5);
        // Maximal ones: {e1}, {e0, e2}.
        assert_eq!(maximal_matchings(&Graph::path(4)).len(), 2);
        // K4 has 3 perfect matchings and nothing else is maximal.
        assert_eq!(maximal_matchings(&Graph::complete(4)).len(), 3);
        assert_eq!(maximal_matchings(&Graph::cycle(5)).len(), 5);
    }

    #[test]
    fn maximum_matching_sizes() {
        assert_eq!(maximum_matching_size(&Graph::complete(5)), 2);
        assert_eq!(maximum_matching_size(&Graph::star(4)), 1);
        assert_eq!(maximum_matching_size(&Graph::path(6)), 3);
        assert_eq!(maximum_matching_size(&Graph::new(3, vec![]).unwrap()), 0);
    }

    #[test]
    fn bipartiteness() {
        assert!(is_bipartite(&Graph::cycle(6)));
        assert!(!is_bipartite(&Graph::cycle(5)));
        assert!(is_bipartite(&Graph::new(2, vec![]).unwrap()));
    }
}
