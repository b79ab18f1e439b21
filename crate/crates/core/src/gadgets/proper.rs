//! Proper instances: generation from an incidence graph, recognition, an
//! independent witness check and the family labeling.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::{coords_adjacent, octopus_index_set, place_octopus, search, Coord, GadgetWitness, OctopusWitness, PortWitness};
use crate::error::{contract, input, Error, Result};
use crate::graph::{to_dot_styled, EdgeId, Graph, GraphJson, LabeledGraph, Labeling, NodeId};
use crate::lcl::ConstraintSet;
use crate::linearizable::{IncidenceGraph, Role};

/// Radius of the family constraint set.
pub const FAMILY_RADIUS: usize = 2;

/// Degree bound of the family constraint set.
const FAMILY_MAX_DEGREE: usize = 8;

/// Which part of a proper instance a node belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Head { octopus: usize },
    Port { octopus: usize, port: usize },
    Inter,
}

/// A graph with its decomposition into octopi and inter-octopus nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProperInstance {
    pub graph: Graph,
    pub octopi: Vec<OctopusWitness>,
    /// Inter-octopus nodes, ascending.
    pub inter: Vec<NodeId>,
    /// The witness re-encoded as labels; see [`family_labeling`].
    pub family: LabeledGraph,
    parts: Vec<(Part, Coord)>,
}

impl ProperInstance {
    /// Checks the witness and attaches the family labeling.
    pub fn new(graph: Graph, octopi: Vec<OctopusWitness>, mut inter: Vec<NodeId>) -> Result<Self> {
        inter.sort_unstable();
        let parts = classify(&graph, &octopi, &inter).map_err(Error::Input)?;
        check_edges(&graph, &octopi, &parts).map_err(Error::Input)?;
        let family = label_family(&graph, &parts);
        Ok(ProperInstance { graph, octopi, inter, family, parts })
    }

    pub fn part(&self, v: NodeId) -> Part {
        self.parts[v].0
    }

    /// Coordinates of `v` inside its gadget (`(0, 0)` for inter nodes).
    pub fn coord(&self, v: NodeId) -> Coord {
        self.parts[v].1
    }

    /// `true` for inter-octopus nodes.
    pub fn lambda(&self) -> Vec<bool> {
        self.parts.iter().map(|(p, _)| *p == Part::Inter).collect()
    }

    pub fn x_max(&self) -> usize {
        self.octopi.iter().map(|o| o.x).max().unwrap_or(0)
    }

    pub fn port_height_max(&self) -> usize {
        self.octopi.iter().flat_map(|o| o.ports.iter().map(|p| p.gadget.height)).max().unwrap_or(0)
    }
}

/// The bijection from port-gadget roots to edges of the source incidence
/// graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "PortMapJson", try_from = "PortMapJson")]
pub struct PortMap {
    /// `roots[e]` is the port root standing for source edge `e`.
    pub roots: Vec<NodeId>,
    inverse: BTreeMap<NodeId, EdgeId>,
}

#[derive(Clone, Serialize, Deserialize)]
struct PortMapJson {
    roots: Vec<NodeId>,
}

impl From<PortMap> for PortMapJson {
    fn from(m: PortMap) -> Self {
        PortMapJson { roots: m.roots }
    }
}

impl TryFrom<PortMapJson> for PortMap {
    type Error = Error;

    fn try_from(j: PortMapJson) -> Result<Self> {
        PortMap::new(j.roots)
    }
}

impl PortMap {
    pub fn new(roots: Vec<NodeId>) -> Result<Self> {
        let inverse: BTreeMap<NodeId, EdgeId> = roots.iter().enumerate().map(|(e, &r)| (r, e)).collect();
        if inverse.len() != roots.len() {
            return input("port map sends two edges to the same root");
        }
        Ok(PortMap { roots, inverse })
    }

    pub fn root_of(&self, e: EdgeId) -> NodeId {
        self.roots[e]
    }

    pub fn edge_of(&self, root: NodeId) -> Option<EdgeId> {
        self.inverse.get(&root).copied()
    }
}

fn ceil_log2(n: usize) -> usize {
    n.next_power_of_two().trailing_zeros() as usize
}

/// Replaces each white of degree `d` by an octopus with `max(d, 1)` ports
/// of height `k` and each black by an inter-octopus node attached to the
/// left-most leaves of the corresponding ports.
///
/// Without `k`, ports have height `⌈log₂ max(n, 2)⌉` and the size bound
/// `n ≤ N ≤ n³` is checked for `n ≥ 2`.
pub fn gen_proper_instance(inc: &IncidenceGraph, k: Option<usize>) -> Result<(ProperInstance, PortMap)> {
    let g = &inc.graph;
    let n = g.node_count();
    if n == 0 {
        return input("incidence graph is empty");
    }
    if g.is_multi() {
        return input("incidence graph has parallel edges");
    }
    let height = k.unwrap_or_else(|| ceil_log2(n.max(2)));
    if height == 0 {
        return input("port height must be at least 1");
    }
    let mut next = 0;
    let mut edges = Vec::new();
    let mut octopi = Vec::with_capacity(inc.whites.len());
    let mut octopus_of = vec![usize::MAX; n];
    for &v in &inc.whites {
        let ports = g.degree(v).max(1);
        let x = ceil_log2(ports).max(1);
        let slots = 1usize << (x - 1);
        let eta: Vec<usize> = (0..slots).map(|i| if i < ports - slots { 2 } else { 1 }).collect();
        octopus_of[v] = octopi.len();
        octopi.push(place_octopus(x, &eta, &vec![height; ports], &mut next, &mut edges));
    }
    let mut roots = vec![0; g.edge_count()];
    for &v in &inc.whites {
        let o = &octopi[octopus_of[v]];
        for (t, &e) in g.adjacency(v).iter().enumerate() {
            roots[e] = o.ports[t].gadget.root();
        }
    }
    let mut inter = Vec::with_capacity(inc.blacks.len());
    for &b in &inc.blacks {
        let node = next;
        next += 1;
        inter.push(node);
        for &e in g.adjacency(b) {
            let v = g.other(e, b);
            let t = g.adjacency(v).iter().position(|&f| f == e).expect("edge is incident to its white");
            edges.push((node, octopi[octopus_of[v]].ports[t].gadget.leftmost_leaf()));
        }
    }
    if k.is_none() && n >= 2 && !(n <= next && next <= n * n * n) {
        return contract(format!("proper instance has {next} nodes, outside [{n}, {}]", n * n * n));
    }
    let pi = ProperInstance::new(Graph::new(next, edges)?, octopi, inter)?;
    Ok((pi, PortMap::new(roots)?))
}

/// Some witness that `g` is a proper instance.
pub fn recognize_proper_instance(g: &Graph) -> Result<Option<ProperInstance>> {
    let Some(found) = search::decompose(g, true)? else {
        return Ok(None);
    };
    ProperInstance::new(g.clone(), found.octopi, found.inter).map(Some)
}

/// Checks a claimed decomposition against the definition: gadgets are
/// disjoint, cover the graph and carry valid coordinates; the only edges
/// between parts are connectors (port root to head leaf `(x − 1, i)`) and
/// attachments of inter-octopus nodes to left-most port leaves.
pub fn verify_witness(g: &Graph, octopi: &[OctopusWitness], inter: &[NodeId]) -> std::result::Result<(), String> {
    let parts = classify(g, octopi, inter)?;
    check_edges(g, octopi, &parts)
}

fn gadget_coords(gadget: &GadgetWitness) -> std::result::Result<Vec<(NodeId, Coord)>, String> {
    if gadget.height == 0 || gadget.height > 30 || gadget.nodes.len() != (1 << gadget.height) - 1 {
        return Err(format!("gadget of height {} has {} nodes", gadget.height, gadget.nodes.len()));
    }
    Ok(gadget.coords().collect())
}

fn classify(g: &Graph, octopi: &[OctopusWitness], inter: &[NodeId]) -> std::result::Result<Vec<(Part, Coord)>, String> {
    let n = g.node_count();
    let mut parts: Vec<Option<(Part, Coord)>> = vec![None; n];
    let mut put = |v: NodeId, p: Part, c: Coord| {
        if v >= n {
            return Err(format!("node {v} is out of range"));
        }
        if parts[v].replace((p, c)).is_some() {
            return Err(format!("node {v} is placed twice"));
        }
        Ok(())
    };
    for (o, oct) in octopi.iter().enumerate() {
        let index = octopus_index_set(oct.x, &oct.eta).map_err(|e| format!("octopus {o}: {e}"))?;
        let listed: Vec<(usize, usize)> = oct.ports.iter().map(|p| (p.i, p.j)).collect();
        if listed != index {
            return Err(format!("octopus {o}: ports {listed:?} do not match eta {:?}", oct.eta));
        }
        if oct.head.height != oct.x {
            return Err(format!("octopus {o}: head height {} is not x = {}", oct.head.height, oct.x));
        }
        for (v, c) in gadget_coords(&oct.head)? {
            put(v, Part::Head { octopus: o }, c)?;
        }
        for (t, port) in oct.ports.iter().enumerate() {
            for (v, c) in gadget_coords(&port.gadget)? {
                put(v, Part::Port { octopus: o, port: t }, c)?;
            }
        }
    }
    for &b in inter {
        put(b, Part::Inter, (0, 0))?;
    }
    parts
        .into_iter()
        .enumerate()
        .map(|(v, p)| p.ok_or_else(|| format!("node {v} belongs to no part")))
        .collect()
}

fn check_edges(g: &Graph, octopi: &[OctopusWitness], parts: &[(Part, Coord)]) -> std::result::Result<(), String> {
    let height = |p: Part| match p {
        Part::Head { octopus } => octopi[octopus].x,
        Part::Port { octopus, port } => octopi[octopus].ports[port].gadget.height,
        Part::Inter => 1,
    };
    let is_connector = |a: (Part, Coord), b: (Part, Coord)| match (a, b) {
        ((Part::Port { octopus: o, port }, (0, 0)), (Part::Head { octopus: h }, (l, k))) => {
            o == h && l + 1 == octopi[o].x && k == octopi[o].ports[port].i
        }
        _ => false,
    };
    let is_attachment = |a: (Part, Coord), b: (Part, Coord)| match (a, b) {
        ((Part::Inter, _), (p @ Part::Port { .. }, (l, 0))) => l + 1 == height(p),
        _ => false,
    };
    let mut inside: BTreeMap<Part, usize> = BTreeMap::new();
    let mut connectors = 0;
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        let (pa, pb) = (parts[a], parts[b]);
        if pa.0 == pb.0 && pa.0 != Part::Inter {
            if !coords_adjacent(pa.1, pb.1) {
                return Err(format!("edge {e} joins non-adjacent coordinates {:?} and {:?}", pa.1, pb.1));
            }
            *inside.entry(pa.0).or_default() += 1;
        } else if is_connector(pa, pb) || is_connector(pb, pa) {
            connectors += 1;
        } else if !(is_attachment(pa, pb) || is_attachment(pb, pa)) {
            return Err(format!("edge {e} = ({a}, {b}) joins {:?} and {:?}", pa.0, pb.0));
        }
    }
    for (o, oct) in octopi.iter().enumerate() {
        let mut gadgets = vec![(Part::Head { octopus: o }, oct.x)];
        gadgets.extend(oct.ports.iter().enumerate().map(|(t, p)| (Part::Port { octopus: o, port: t }, p.gadget.height)));
        for (p, h) in gadgets {
            let expected = (1usize << h) - 2 + (0..h).map(|l| (1usize << l) - 1).sum::<usize>();
            let found = inside.get(&p).copied().unwrap_or(0);
            if found != expected {
                return Err(format!("{p:?} has {found} internal edges, expected {expected}"));
            }
        }
    }
    let expected: usize = octopi.iter().map(|o| o.ports.len()).sum();
    if connectors != expected {
        return Err(format!("{connectors} connector edges, expected {expected}"));
    }
    Ok(())
}

/// Node labels `H`, `P`, `I` by part; half-edge labels give the direction
/// of the edge as seen from its node: `up`, `dl`, `dr`, `l`, `r` inside a
/// gadget, `port`/`head` on connectors and `inter`/`att` on attachments.
pub fn family_labeling(pi: &ProperInstance) -> &LabeledGraph {
    &pi.family
}

fn label_family(g: &Graph, parts: &[(Part, Coord)]) -> LabeledGraph {
    let node = |v: NodeId| match parts[v].0 {
        Part::Head { .. } => "H",
        Part::Port { .. } => "P",
        Part::Inter => "I",
    };
    let toward = |v: NodeId, u: NodeId| -> &'static str {
        let ((pv, (lv, kv)), (pu, (lu, ku))) = (parts[v], parts[u]);
        match (pv, pu) {
            (Part::Inter, _) => "att",
            (_, Part::Inter) => "inter",
            _ if pv != pu => {
                if matches!(pv, Part::Head { .. }) {
                    "port"
                } else {
                    "head"
                }
            }
            _ if lu + 1 == lv => "up",
            _ if lu == lv + 1 => {
                if ku % 2 == 0 {
                    "dl"
                } else {
                    "dr"
                }
            }
            _ if ku < kv => "l",
            _ => "r",
        }
    };
    let labels = Labeling {
        nodes: (0..g.node_count()).map(|v| node(v).to_string()).collect(),
        half_edges: g.edges().iter().map(|&(a, b)| [toward(a, b).to_string(), toward(b, a).to_string()]).collect(),
    };
    let alphabet = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
    LabeledGraph::with_alphabets(
        g.clone(),
        labels,
        alphabet(&["H", "P", "I"]),
        alphabet(&["up", "dl", "dr", "l", "r", "port", "head", "inter", "att"]),
    )
    .expect("family labels are drawn from the family alphabets")
}

/// Incidence graph with whites of the given degrees, each edge going to a
/// fresh black of degree 1, plus blacks of the given degrees whose other
/// members are fresh whites of degree 1.
fn reference_incidence(white_degrees: &[usize], black_degrees: &[usize]) -> IncidenceGraph {
    let mut roles = Vec::new();
    let mut edges = Vec::new();
    for &d in white_degrees {
        let w = roles.len();
        roles.push(Role::White);
        for _ in 0..d {
            edges.push((w, roles.len()));
            roles.push(Role::Black);
        }
    }
    for &d in black_degrees {
        let b = roles.len();
        roles.push(Role::Black);
        for _ in 0..d {
            edges.push((roles.len(), b));
            roles.push(Role::White);
        }
    }
    IncidenceGraph::new(Graph::new(roles.len(), edges).expect("reference graph is simple"), roles)
        .expect("reference graph is bipartite")
}

/// The family constraint set: every radius-2 ball of the family labeling
/// on reference instances covering white degrees 0 to 8, inter degrees 0
/// to 8 and port heights 1 to 6. Balls stop changing with the port height
/// from height 6 on, so this covers all instances whose whites have degree
/// at most 8 and whose inter nodes have degree at most 8.
pub fn family_constraints() -> &'static ConstraintSet {
    static SET: OnceLock<ConstraintSet> = OnceLock::new();
    SET.get_or_init(|| {
        let mut set: Option<ConstraintSet> = None;
        let whites: Vec<usize> = (0..=8).collect();
        let blacks: Vec<usize> = (0..=FAMILY_MAX_DEGREE).collect();
        for k in 1..=6 {
            let inc = reference_incidence(&whites, &blacks);
            let (pi, _) = gen_proper_instance(&inc, Some(k)).expect("reference instance is valid");
            match set.as_mut() {
                None => {
                    set = Some(
                        ConstraintSet::from_balls_of(&pi.family, FAMILY_RADIUS, FAMILY_MAX_DEGREE)
                            .expect("reference balls respect the family bounds"),
                    )
                }
                Some(s) => s.absorb(&pi.family).expect("reference balls respect the family bounds"),
            }
        }
        set.expect("at least one reference instance")
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GadgetJson {
    pub height: usize,
    /// Nodes in layer-major coordinate order.
    pub nodes: Vec<NodeId>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PortJson {
    pub i: usize,
    pub j: usize,
    pub gadget: GadgetJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OctopusJson {
    pub x: usize,
    pub eta: Vec<usize>,
    pub head: GadgetJson,
    pub ports: Vec<PortJson>,
}

/// Graphviz rendering of the family labeling with head, port and
/// inter-octopus nodes filled in distinct colors.
pub fn proper_instance_dot(pi: &ProperInstance, name: &str) -> String {
    to_dot_styled(&pi.family, name, |v| {
        Some(
            match pi.part(v) {
                Part::Head { .. } => "lightblue",
                Part::Port { .. } => "palegreen",
                Part::Inter => "orange",
            }
            .to_string(),
        )
    })
}

/// A proper instance with its witness and, when generated, its port map.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProperInstanceJson {
    pub graph: GraphJson,
    /// `true` for inter-octopus nodes.
    pub lambda: Vec<bool>,
    pub octopi: Vec<OctopusJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub port_map: Option<PortMap>,
}

impl ProperInstanceJson {
    pub fn from_instance(pi: &ProperInstance, port_map: Option<&PortMap>) -> Self {
        let gadget = |g: &GadgetWitness| GadgetJson { height: g.height, nodes: g.nodes.clone() };
        ProperInstanceJson {
            graph: GraphJson::from_labeled(&pi.family),
            lambda: pi.lambda(),
            octopi: pi
                .octopi
                .iter()
                .map(|o| OctopusJson {
                    x: o.x,
                    eta: o.eta.clone(),
                    head: gadget(&o.head),
                    ports: o.ports.iter().map(|p| PortJson { i: p.i, j: p.j, gadget: gadget(&p.gadget) }).collect(),
                })
                .collect(),
            port_map: port_map.cloned(),
        }
    }

    pub fn to_instance(&self) -> Result<(ProperInstance, Option<PortMap>)> {
        let graph = self.graph.to_graph()?;
        if self.lambda.len() != graph.node_count() {
            return input("lambda needs one entry per node");
        }
        let gadget = |g: &GadgetJson| GadgetWitness { height: g.height, nodes: g.nodes.clone() };
        let octopi = self
            .octopi
            .iter()
            .map(|o| OctopusWitness {
                x: o.x,
                eta: o.eta.clone(),
                head: gadget(&o.head),
                ports: o.ports.iter().map(|p| PortWitness { i: p.i, j: p.j, gadget: gadget(&p.gadget) }).collect(),
            })
            .collect();
        let inter = (0..graph.node_count()).filter(|&v| self.lambda[v]).collect();
        let pi = ProperInstance::new(graph, octopi, inter)?;
        let port_map = self.port_map.clone();
        if let Some(m) = &port_map {
            if let Some(&r) = m.roots.iter().find(|&&r| r >= pi.graph.node_count() || pi.coord(r) != (0, 0)) {
                return input(format!("port map names {r}, which is not a port root"));
            }
            if m.roots.iter().any(|&r| !matches!(pi.part(r), Part::Port { .. })) {
                return input("port map names a node outside the port gadgets");
            }
        }
        Ok((pi, port_map))
    }
}
