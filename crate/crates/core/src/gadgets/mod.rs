//! Tree-like and octopus gadgets, proper instances built from them, and
//! the lift of a linearizable problem onto proper instances.

mod lift;
mod proper;
mod search;

use std::collections::BTreeMap;

use crate::error::{input, Result};
use crate::graph::{Graph, NodeId};

pub use lift::{
    contract_octopi, lift_slocal_algorithm, pullback_labeling, pullback_outcome, verify_pi_promise, Contracted,
    LiftRun, PromiseVerdict, BOTTOM,
};
pub use proper::{
    family_constraints, family_labeling, gen_proper_instance, proper_instance_dot, recognize_proper_instance, verify_witness, PortMap,
    ProperInstance, ProperInstanceJson, FAMILY_RADIUS,
};

/// `(layer, position)` inside a tree-like gadget.
pub type Coord = (usize, usize);

/// Index of `(l, k)` in layer-major order.
pub fn coord_index((l, k): Coord) -> usize {
    (1 << l) - 1 + k
}

/// Whether two coordinates are adjacent in a tree-like gadget.
pub fn coords_adjacent((l1, k1): Coord, (l2, k2): Coord) -> bool {
    (l1 == l2 && k1.abs_diff(k2) == 1) || (l2 + 1 == l1 && k2 == k1 / 2) || (l1 + 1 == l2 && k1 == k2 / 2)
}

fn layer_major(height: usize) -> Vec<Coord> {
    (0..height).flat_map(|l| (0..1usize << l).map(move |k| (l, k))).collect()
}

fn height_of(n: usize) -> Option<usize> {
    let h = (n + 1).trailing_zeros() as usize;
    (n >= 1 && (n + 1).is_power_of_two()).then_some(h)
}

/// A gadget placed inside a larger graph: `nodes[coord_index(c)]` has
/// coordinate `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetWitness {
    pub height: usize,
    pub nodes: Vec<NodeId>,
}

impl GadgetWitness {
    pub fn node(&self, c: Coord) -> NodeId {
        self.nodes[coord_index(c)]
    }

    pub fn root(&self) -> NodeId {
        self.nodes[0]
    }

    /// The left-most leaf `(h - 1, 0)`.
    pub fn leftmost_leaf(&self) -> NodeId {
        self.node((self.height - 1, 0))
    }

    pub fn coords(&self) -> impl Iterator<Item = (NodeId, Coord)> + '_ {
        layer_major(self.height).into_iter().map(|c| (self.node(c), c))
    }
}

/// A standalone tree-like gadget with its coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeLikeGadget {
    pub graph: Graph,
    pub height: usize,
    pub coords: Vec<Coord>,
}

pub fn gen_tree_like(height: usize) -> Result<TreeLikeGadget> {
    if height == 0 {
        return input("tree-like gadget height must be at least 1");
    }
    let coords = layer_major(height);
    let mut edges = Vec::new();
    for &(l, k) in &coords {
        if k + 1 < 1 << l {
            edges.push((coord_index((l, k)), coord_index((l, k + 1))));
        }
        if l > 0 {
            edges.push((coord_index((l - 1, k / 2)), coord_index((l, k))));
        }
    }
    Ok(TreeLikeGadget { graph: Graph::new(coords.len(), edges)?, height, coords })
}

/// Every valid coordinate assignment of `g` (at most `limit`).
///
/// Layers are BFS layers from the root; each layer must induce a path,
/// oriented from the child of the layer's left-most parent. Only layer 1
/// admits both orientations.
pub fn tree_like_assignments(g: &Graph, limit: usize) -> Vec<Vec<Coord>> {
    let n = g.node_count();
    let Some(height) = height_of(n) else {
        return Vec::new();
    };
    if g.is_multi() {
        return Vec::new();
    }
    let expected_edges: usize = (0..height).map(|l| (1usize << l) - 1).sum::<usize>() + n - 1;
    if g.edge_count() != expected_edges {
        return Vec::new();
    }
    let mut out = Vec::new();
    for root in 0..n {
        if g.degree(root) != if n == 1 { 0 } else { 2 } {
            continue;
        }
        for flip in [false, true] {
            if let Some(c) = assign_from_root(g, root, height, flip) {
                if !out.contains(&c) {
                    out.push(c);
                }
                if out.len() >= limit {
                    return out;
                }
            }
            if n == 1 {
                break;
            }
        }
    }
    out
}

fn assign_from_root(g: &Graph, root: NodeId, height: usize, flip: bool) -> Option<Vec<Coord>> {
    let dist = g.bfs([root]);
    let mut layers: Vec<Vec<NodeId>> = vec![Vec::new(); height];
    for (v, d) in dist.iter().enumerate() {
        let d = (*d)?;
        if d >= height {
            return None;
        }
        layers[d].push(v);
    }
    let mut coords: Vec<Option<Coord>> = vec![None; g.node_count()];
    coords[root] = Some((0, 0));
    for l in 1..height {
        let layer = &layers[l];
        if layer.len() != 1 << l {
            return None;
        }
        let order = induced_path(g, layer)?;
        let (first, last) = (order[0], *order.last().expect("nonempty layer"));
        let left_parent = layers[l - 1].iter().copied().find(|&p| coords[p] == Some((l - 1, 0)))?;
        let touches = |v: NodeId| g.neighbors(v).any(|u| u == left_parent);
        let forward = if l == 1 {
            !flip
        } else {
            match (touches(first), touches(last)) {
                (true, false) => true,
                (false, true) => false,
                _ => return None,
            }
        };
        for (k, &v) in order.iter().enumerate() {
            let k = if forward { k } else { layer.len() - 1 - k };
            coords[v] = Some((l, k));
        }
    }
    let coords: Vec<Coord> = coords.into_iter().collect::<Option<_>>()?;
    g.edges().iter().all(|&(a, b)| coords_adjacent(coords[a], coords[b])).then_some(coords)
}

/// Nodes of `layer` in path order, if they induce a simple path.
fn induced_path(g: &Graph, layer: &[NodeId]) -> Option<Vec<NodeId>> {
    let inside = |v: NodeId| layer.contains(&v);
    let nbrs: BTreeMap<NodeId, Vec<NodeId>> =
        layer.iter().map(|&v| (v, g.neighbors(v).filter(|&u| inside(u)).collect())).collect();
    if layer.len() == 1 {
        return nbrs[&layer[0]].is_empty().then(|| layer.to_vec());
    }
    if nbrs.values().any(|n| n.len() > 2) {
        return None;
    }
    let start = *nbrs.iter().find(|(_, n)| n.len() == 1)?.0;
    let mut order = vec![start];
    let mut prev = None;
    let mut cur = start;
    while let Some(&next) = nbrs[&cur].iter().find(|&&u| Some(u) != prev) {
        if order.contains(&next) {
            return None;
        }
        order.push(next);
        prev = Some(cur);
        cur = next;
    }
    (order.len() == layer.len()).then_some(order)
}

/// Some coordinate assignment of `g`, if it is a tree-like gadget.
pub fn recognize_tree_like(g: &Graph) -> Option<TreeLikeGadget> {
    let coords = tree_like_assignments(g, 1).pop()?;
    let height = height_of(g.node_count())?;
    Some(TreeLikeGadget { graph: g.clone(), height, coords })
}

/// One port of an octopus: its index `(i, j)` and placement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PortWitness {
    pub i: usize,
    pub j: usize,
    pub gadget: GadgetWitness,
}

/// An octopus inside a larger graph. Ports are in `(i, j)` order, which is
/// the left-to-right order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OctopusWitness {
    pub x: usize,
    pub eta: Vec<usize>,
    pub head: GadgetWitness,
    pub ports: Vec<PortWitness>,
}

impl OctopusWitness {
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.head.nodes.iter().chain(self.ports.iter().flat_map(|p| p.gadget.nodes.iter())).copied()
    }

    pub fn node_count(&self) -> usize {
        self.head.nodes.len() + self.ports.iter().map(|p| p.gadget.nodes.len()).sum::<usize>()
    }
}

/// A standalone octopus gadget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OctopusGadget {
    pub graph: Graph,
    pub witness: OctopusWitness,
}

/// Checks `(x, η, W)` and returns the port index set in `(i, j)` order.
pub(crate) fn octopus_index_set(x: usize, eta: &[usize]) -> Result<Vec<(usize, usize)>> {
    if x == 0 {
        return input("octopus head height must be at least 1");
    }
    if eta.len() != 1 << (x - 1) {
        return input(format!("eta has {} entries, expected {}", eta.len(), 1usize << (x - 1)));
    }
    if let Some(bad) = eta.iter().find(|&&e| e != 1 && e != 2) {
        return input(format!("eta entry {bad} is not 1 or 2"));
    }
    Ok(eta.iter().enumerate().flat_map(|(i, &e)| (1..=e).map(move |j| (i, j))).collect())
}

/// Appends a tree-like gadget of `height` to `edges`, using fresh ids from
/// `next`.
pub(crate) fn place_tree_like(height: usize, next: &mut usize, edges: &mut Vec<(NodeId, NodeId)>) -> GadgetWitness {
    let t = gen_tree_like(height).expect("height is positive");
    let base = *next;
    *next += t.graph.node_count();
    edges.extend(t.graph.edges().iter().map(|&(a, b)| (base + a, base + b)));
    GadgetWitness { height, nodes: (base..*next).collect() }
}

pub(crate) fn place_octopus(
    x: usize,
    eta: &[usize],
    weights: &[usize],
    next: &mut NodeId,
    edges: &mut Vec<(NodeId, NodeId)>,
) -> OctopusWitness {
    let head = place_tree_like(x, next, edges);
    let index = octopus_index_set(x, eta).expect("validated by the caller");
    let ports = index
        .into_iter()
        .zip(weights)
        .map(|((i, j), &w)| {
            let gadget = place_tree_like(w, next, edges);
            edges.push((head.node((x - 1, i)), gadget.root()));
            PortWitness { i, j, gadget }
        })
        .collect();
    OctopusWitness { x, eta: eta.to_vec(), head, ports }
}

/// Builds an `(x, η, W)`-octopus. `weights` must be defined exactly on the
/// index set `{(i, j) : j <= η_i}`.
pub fn gen_octopus(x: usize, eta: &[usize], weights: &BTreeMap<(usize, usize), usize>) -> Result<OctopusGadget> {
    let index = octopus_index_set(x, eta)?;
    if weights.keys().copied().collect::<Vec<_>>() != index {
        return input("weights are not defined exactly on the port index set");
    }
    if weights.values().any(|&w| w == 0) {
        return input("port heights must be positive");
    }
    let w: Vec<usize> = index.iter().map(|ij| weights[ij]).collect();
    let mut next = 0;
    let mut edges = Vec::new();
    let witness = place_octopus(x, eta, &w, &mut next, &mut edges);
    Ok(OctopusGadget { graph: Graph::new(next, edges)?, witness })
}

/// Some octopus witness for a connected graph, if it is an octopus gadget.
pub fn recognize_octopus(g: &Graph) -> Result<Option<OctopusWitness>> {
    if g.node_count() == 0 || !g.is_connected() {
        return Ok(None);
    }
    let Some(found) = search::decompose(g, false)? else {
        return Ok(None);
    };
    if found.octopi.len() != 1 || !found.inter.is_empty() {
        return Ok(None);
    }
    Ok(found.octopi.into_iter().next())
}
