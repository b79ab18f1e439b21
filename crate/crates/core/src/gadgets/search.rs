//! Decomposition of a graph into octopus gadgets and inter-octopus nodes.
//!
//! Nodes sharing a triangle always lie in one gadget of height at least 2,
//! and every such gadget is triangle-connected, so the triangle classes are
//! exactly those gadgets. Each class (or leftover single node) becomes a
//! unit whose candidates fix a coordinate assignment and a role; a
//! backtracking search picks one candidate per unit so that every edge
//! between units is a connector or an inter-octopus attachment.

use std::collections::BTreeMap;

use super::{coord_index, proper, tree_like_assignments, Coord, GadgetWitness, OctopusWitness, PortWitness};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// Candidate expansions allowed per call before giving up.
const EXPANSION_BUDGET: usize = 1_000_000;

pub(crate) struct Decomposition {
    pub octopi: Vec<OctopusWitness>,
    pub inter: Vec<NodeId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    HeadInner,
    HeadLeaf,
    PortRoot,
    PortLeaf,
    PortInner,
    PortSingle,
    Inter,
}

impl Kind {
    fn external_degree_ok(self, d: usize) -> bool {
        match self {
            Kind::HeadInner | Kind::PortInner => d == 0,
            Kind::HeadLeaf => (1..=2).contains(&d),
            Kind::PortRoot => d == 1,
            Kind::PortSingle => d >= 1,
            Kind::PortLeaf | Kind::Inter => true,
        }
    }

    fn may_touch(self, other: Kind) -> bool {
        use Kind::*;
        matches!(
            (self, other),
            (HeadLeaf, PortRoot | PortSingle) | (PortRoot | PortSingle, HeadLeaf) | (PortLeaf | PortSingle, Inter) | (Inter, PortLeaf | PortSingle)
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Role {
    Head,
    Port,
    Inter,
}

struct Candidate {
    role: Role,
    coords: Vec<Coord>,
    kinds: Vec<Kind>,
}

struct Unit {
    nodes: Vec<NodeId>,
    candidates: Vec<Candidate>,
}

struct Search<'a> {
    g: &'a Graph,
    units: Vec<Unit>,
    /// Unit and position of every node.
    place: Vec<(usize, usize)>,
    /// Edges leaving each unit: (own position, other unit, other position).
    external: Vec<Vec<(usize, usize, usize)>>,
    expansions: usize,
}

/// Splits `g` into octopi and (if `allow_inter`) inter-octopus nodes, or
/// reports that no such split exists.
pub(crate) fn decompose(g: &Graph, allow_inter: bool) -> Result<Option<Decomposition>> {
    if g.is_multi() || g.node_count() == 0 {
        return Ok(None);
    }
    let Some(units) = build_units(g, allow_inter) else {
        return Ok(None);
    };
    let mut place = vec![(0, 0); g.node_count()];
    for (u, unit) in units.iter().enumerate() {
        for (i, &v) in unit.nodes.iter().enumerate() {
            place[v] = (u, i);
        }
    }
    let mut external = vec![Vec::new(); units.len()];
    for &(a, b) in g.edges() {
        let ((ua, ia), (ub, ib)) = (place[a], place[b]);
        if ua != ub {
            external[ua].push((ia, ub, ib));
            external[ub].push((ib, ua, ia));
        }
    }
    let mut s = Search { g, units, place, external, expansions: 0 };
    s.prefilter();

    let mut chosen: Vec<Option<usize>> = vec![None; s.units.len()];
    for component in g.components() {
        let mut members: Vec<usize> = component.iter().map(|&v| s.place[v].0).collect();
        members.sort_unstable();
        members.dedup();
        let domains: BTreeMap<usize, Vec<usize>> =
            members.iter().map(|&u| (u, (0..s.units[u].candidates.len()).collect())).collect();
        if !s.solve(domains, &mut chosen)? {
            return Ok(None);
        }
    }
    let chosen: Vec<usize> = chosen.into_iter().map(|c| c.expect("every unit is solved")).collect();
    let found = s.assemble(&chosen);
    if let Err(why) = proper::verify_witness(g, &found.octopi, &found.inter) {
        return Err(Error::Contract(format!("decomposition failed its own check: {why}")));
    }
    Ok(Some(found))
}

fn find(parent: &mut [usize], v: usize) -> usize {
    let mut r = v;
    while parent[r] != r {
        r = parent[r];
    }
    let mut v = v;
    while parent[v] != r {
        let next = parent[v];
        parent[v] = r;
        v = next;
    }
    r
}

fn build_units(g: &Graph, allow_inter: bool) -> Option<Vec<Unit>> {
    let n = g.node_count();
    let mut parent: Vec<usize> = (0..n).collect();
    for &(a, b) in g.edges() {
        for c in g.neighbors(a) {
            if c != b && g.find_edge(b, c).is_some() {
                for x in [b, c] {
                    let (ra, rx) = (find(&mut parent, a), find(&mut parent, x));
                    parent[ra.max(rx)] = ra.min(rx);
                }
            }
        }
    }
    let mut classes: BTreeMap<usize, Vec<NodeId>> = BTreeMap::new();
    for v in 0..n {
        let r = find(&mut parent, v);
        classes.entry(r).or_default().push(v);
    }
    let mut units = Vec::new();
    for nodes in classes.into_values() {
        let candidates = if nodes.len() == 1 {
            let mut c = vec![
                Candidate { role: Role::Head, coords: vec![(0, 0)], kinds: vec![Kind::HeadLeaf] },
                Candidate { role: Role::Port, coords: vec![(0, 0)], kinds: vec![Kind::PortSingle] },
            ];
            if allow_inter {
                c.push(Candidate { role: Role::Inter, coords: vec![(0, 0)], kinds: vec![Kind::Inter] });
            }
            c
        } else {
            let (sub, _) = g.induced(&nodes);
            let assignments = tree_like_assignments(&sub, usize::MAX);
            if assignments.is_empty() {
                return None;
            }
            let height = assignments[0].iter().map(|c| c.0).max().expect("nonempty") + 1;
            let mut c = Vec::new();
            for coords in assignments {
                let head = coords.iter().map(|&(l, _)| if l + 1 == height { Kind::HeadLeaf } else { Kind::HeadInner });
                let port = coords.iter().map(|&co| match co {
                    (0, 0) => Kind::PortRoot,
                    (l, 0) if l + 1 == height => Kind::PortLeaf,
                    _ => Kind::PortInner,
                });
                let port: Vec<Kind> = port.collect();
                c.push(Candidate { role: Role::Head, coords: coords.clone(), kinds: head.collect() });
                c.push(Candidate { role: Role::Port, coords, kinds: port });
            }
            c
        };
        units.push(Unit { nodes, candidates });
    }
    Some(units)
}

impl Search<'_> {
    fn prefilter(&mut self) {
        let mut degree = vec![Vec::new(); self.units.len()];
        for (u, unit) in self.units.iter().enumerate() {
            degree[u] = vec![0usize; unit.nodes.len()];
            for &(i, _, _) in &self.external[u] {
                degree[u][i] += 1;
            }
        }
        for (u, unit) in self.units.iter_mut().enumerate() {
            unit.candidates.retain(|c| c.kinds.iter().zip(&degree[u]).all(|(k, &d)| k.external_degree_ok(d)));
        }
    }

    fn kind(&self, u: usize, c: usize, i: usize) -> Kind {
        self.units[u].candidates[c].kinds[i]
    }

    fn solve(&mut self, domains: BTreeMap<usize, Vec<usize>>, chosen: &mut [Option<usize>]) -> Result<bool> {
        self.expansions += 1;
        if self.expansions > EXPANSION_BUDGET {
            return Err(Error::Budget(format!(
                "octopus decomposition of a {}-node graph needed more than {EXPANSION_BUDGET} expansions",
                self.g.node_count()
            )));
        }
        let Some((&u, _)) = domains.iter().filter(|(u, _)| chosen[**u].is_none()).min_by_key(|(_, d)| d.len()) else {
            return Ok(true);
        };
        for &c in &domains[&u] {
            chosen[u] = Some(c);
            if let Some(next) = self.propagate(&domains, chosen, u, c) {
                if self.solve(next, chosen)? {
                    return Ok(true);
                }
            }
        }
        chosen[u] = None;
        Ok(false)
    }

    /// Narrows the neighbors' domains after fixing candidate `c` of `u`.
    fn propagate(
        &self,
        domains: &BTreeMap<usize, Vec<usize>>,
        chosen: &[Option<usize>],
        u: usize,
        c: usize,
    ) -> Option<BTreeMap<usize, Vec<usize>>> {
        let mut next = domains.clone();
        next.insert(u, vec![c]);
        for &(i, v, j) in &self.external[u] {
            let mine = self.kind(u, c, i);
            if let Some(cv) = chosen[v] {
                if !mine.may_touch(self.kind(v, cv, j)) {
                    return None;
                }
                continue;
            }
            let d = next.get_mut(&v).expect("neighbors share a component");
            d.retain(|&cv| mine.may_touch(self.kind(v, cv, j)));
            if d.is_empty() {
                return None;
            }
        }
        let mut touched = vec![u];
        touched.extend(self.external[u].iter().map(|&(_, v, _)| v));
        touched.into_iter().all(|w| self.single_ports_ok(w, chosen)).then_some(next)
    }

    /// A single-node port hangs from exactly one head leaf.
    fn single_ports_ok(&self, u: usize, chosen: &[Option<usize>]) -> bool {
        let Some(c) = chosen[u] else {
            return true;
        };
        let unit = &self.units[u];
        (0..unit.nodes.len()).filter(|&i| self.kind(u, c, i) == Kind::PortSingle).all(|i| {
            let mut heads = 0;
            let mut open = false;
            for &(own, v, j) in &self.external[u] {
                if own != i {
                    continue;
                }
                match chosen[v] {
                    Some(cv) if self.kind(v, cv, j) == Kind::HeadLeaf => heads += 1,
                    Some(_) => {}
                    None => open = true,
                }
            }
            heads == 1 || (heads == 0 && open)
        })
    }

    fn witness(&self, u: usize, c: usize) -> GadgetWitness {
        let cand = &self.units[u].candidates[c];
        let height = cand.coords.iter().map(|co| co.0).max().expect("nonempty") + 1;
        let mut nodes = vec![0; cand.coords.len()];
        for (&v, &co) in self.units[u].nodes.iter().zip(&cand.coords) {
            nodes[coord_index(co)] = v;
        }
        GadgetWitness { height, nodes }
    }

    fn assemble(&self, chosen: &[usize]) -> Decomposition {
        let mut octopi = Vec::new();
        let mut inter = Vec::new();
        for (u, &c) in chosen.iter().enumerate() {
            match self.units[u].candidates[c].role {
                Role::Inter => inter.push(self.units[u].nodes[0]),
                Role::Port => {}
                Role::Head => {
                    let head = self.witness(u, c);
                    let x = head.height;
                    let mut eta = Vec::new();
                    let mut ports = Vec::new();
                    for i in 0..1usize << (x - 1) {
                        let leaf = head.node((x - 1, i));
                        let mut hung: Vec<GadgetWitness> = self
                            .g
                            .neighbors(leaf)
                            .filter_map(|w| {
                                let (pu, _) = self.place[w];
                                (pu != u).then(|| self.witness(pu, chosen[pu]))
                            })
                            .collect();
                        hung.sort_by_key(|p| p.root());
                        eta.push(hung.len());
                        ports.extend(hung.into_iter().enumerate().map(|(j, gadget)| PortWitness { i, j: j + 1, gadget }));
                    }
                    octopi.push(OctopusWitness { x, eta, head, ports });
                }
            }
        }
        octopi.sort_by_key(|o| o.head.root());
        inter.sort_unstable();
        Decomposition { octopi, inter }
    }
}
