//! The eight acceptance checks. Each returns a [`CheckReport`]; library
//! errors are recorded as failures rather than propagated.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::Arc;

use itertools::Itertools;
use nslab_core::gadgets::{
    gen_octopus, gen_proper_instance, gen_tree_like, lift_slocal_algorithm, pullback_labeling, pullback_outcome,
    recognize_octopus, recognize_proper_instance, recognize_tree_like, verify_pi_promise, verify_witness, OctopusWitness,
    ProperInstance, BOTTOM,
};
use nslab_core::graph::{extract_view, views_isomorphic, Graph, LabeledGraph, Labeling, NodeId, View, ANON};
use nslab_core::linearizable::{
    decode_to_matching, encode_matching, greedy_matching_edges, is_maximal_matching, verify_linearizable,
    GreedyMatching, IncidenceGraph, LinearizableProblem,
};
use nslab_core::lp::{
    approximation_against, build_fractional_matching_lp, check_feasible, cycle_completion, dequantize, exact_opt,
    labeling_from_point, local_expectation_algorithm, maximal_matching_to_fractional, point_from_labeling,
    whole_graph_completion, Approximation, DistLp, LpOptimum, LpPoint, Oracle,
};
use nslab_core::outcome::{
    run_local, run_rand_local, run_slocal, verify_non_signaling, Outcome, SeedMode,
    DEFAULT_ISOMORPHISM_CAP,
};
use nslab_core::rational::{self, int, ratio, zero, Rational};
use nslab_core::Result;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algorithms::{agreeing_seeds, seed_census, uniform_maximal_matching_oracle};
use crate::corpus::{connected_graphs, graphs_up_to_iso, random_graph, random_incidence, random_order};
use crate::oracle::{is_bipartite, maximal_matchings, maximum_matching_size};
use crate::report::CheckReport;

pub const MIXTURES_PER_GRAPH: usize = 200;
pub const RANDOM_GRAPHS: usize = 500;
pub const ORDERS_PER_GRAPH: usize = 20;
pub const MUTATIONS_PER_INSTANCE: usize = 50;
pub const RANDOM_INCIDENCE_GRAPHS: usize = 50;

/// Independent random stream per check, all derived from one seed.
fn stream(seed: u64, id: u8) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::from(id));
    rng
}

fn record<T>(c: &mut CheckReport, what: impl FnOnce() -> String, r: Result<T>) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(e) => {
            c.fail(format!("{}: {e}", what()));
            None
        }
    }
}

fn describe(g: &Graph) -> String {
    format!("n={} edges={:?}", g.node_count(), g.edges())
}

fn random_weights(rng: &mut ChaCha8Rng, k: usize) -> Vec<Rational> {
    let w: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=9)).collect();
    let total: i64 = w.iter().sum();
    w.into_iter().map(|x| ratio(x, total)).collect()
}

/// A random maximal matching (greedy over a shuffled edge list).
fn random_maximal_matching(rng: &mut ChaCha8Rng, g: &Graph) -> Vec<usize> {
    let mut edges: Vec<usize> = (0..g.edge_count()).collect();
    edges.shuffle(rng);
    let mut covered = vec![false; g.node_count()];
    let mut m = Vec::new();
    for e in edges {
        let (a, b) = g.endpoints(e);
        if !covered[a] && !covered[b] {
            covered[a] = true;
            covered[b] = true;
            m.push(e);
        }
    }
    m.sort_unstable();
    m
}

/// Either a random maximal matching or random integer weights scaled so
/// that every node sum is at most 1.
fn random_feasible_point(rng: &mut ChaCha8Rng, g: &Graph) -> Result<LpPoint> {
    if rng.gen_ratio(1, 3) {
        return maximal_matching_to_fractional(g, &random_maximal_matching(rng, g));
    }
    let w: Vec<i64> = (0..g.edge_count()).map(|_| rng.gen_range(0..=4)).collect();
    let mut load = vec![0i64; g.node_count()];
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        load[a] += w[e];
        load[b] += w[e];
    }
    let scale = load.into_iter().max().unwrap_or(0).max(1);
    Ok(LpPoint((0..g.edge_count()).map(|e| (nslab_core::lp::edge_var(e), ratio(w[e], scale))).collect()))
}

fn ratio_text(a: &Option<Approximation>) -> String {
    a.as_ref().map_or_else(|| "none".to_string(), ToString::to_string)
}

/// Random mixtures of feasible matching-LP points: the expectation is
/// feasible, has the expected objective, and approximates no worse than the
/// worst support point.
pub fn dequantization_soundness(seed: u64) -> CheckReport {
    let mut c = CheckReport::new(1, "dequantization soundness");
    let mut rng = stream(seed, 1);
    let (mut graphs, mut mixtures) = (0usize, 0usize);
    let mut worst: Option<Approximation> = None;
    for n in 1..=6 {
        for g in connected_graphs(n) {
            graphs += 1;
            let Some(lp) = record(&mut c, || describe(&g), build_fractional_matching_lp(&g)) else { continue };
            let opt = exact_opt(&lp);
            let input = LabeledGraph::anonymous(g.clone());
            for _ in 0..MIXTURES_PER_GRAPH {
                mixtures += 1;
                let r = one_mixture(&mut rng, &g, &lp, &opt, &input);
                match r {
                    Ok(Ok(a)) => worst = worst.max(Some(a)),
                    Ok(Err(msg)) => c.fail(format!("{}: {msg}", describe(&g))),
                    Err(e) => c.fail(format!("{}: {e}", describe(&g))),
                }
            }
        }
    }
    c.set("graphs", graphs);
    c.set("mixtures", mixtures);
    c.set("worst_dequantized_ratio", ratio_text(&worst));
    c
}

fn one_mixture(
    rng: &mut ChaCha8Rng,
    g: &Graph,
    lp: &DistLp,
    opt: &LpOptimum,
    input: &LabeledGraph,
) -> Result<std::result::Result<Approximation, String>> {
    let k = rng.gen_range(1..=4);
    let weights = random_weights(rng, k);
    let mut entries = Vec::with_capacity(k);
    for w in weights {
        let x = random_feasible_point(rng, g)?;
        entries.push((labeling_from_point(lp, &x)?, w));
    }
    let o = Outcome::new(input.clone(), entries)?;
    let x_hat = dequantize(lp, &o)?;
    let feasibility = check_feasible(lp, &x_hat)?;
    if !feasibility.is_ok() {
        return Ok(Err(format!("dequantized point is infeasible: {feasibility:?}")));
    }
    let mut expected = zero();
    let mut worst_support = Approximation::Ratio(int(1));
    for (l, p) in o.support() {
        let x = point_from_labeling(lp, l)?;
        expected += lp.objective_value(&x)? * p;
        worst_support = worst_support.max(approximation_against(lp, &x, opt)?);
    }
    let value = lp.objective_value(&x_hat)?;
    if value != expected {
        return Ok(Err(format!(
            "objective {} differs from the expected objective {}",
            rational::format(&value),
            rational::format(&expected)
        )));
    }
    let a = approximation_against(lp, &x_hat, opt)?;
    if a > worst_support {
        return Ok(Err(format!("dequantized ratio {a} exceeds the worst support ratio {worst_support}")));
    }
    Ok(Ok(a))
}

/// Running the local-expectation algorithm equals dequantizing the oracle,
/// and on cycles the choice of completion does not matter.
pub fn local_expectation_equivalence(seed: u64) -> CheckReport {
    let _ = seed;
    let mut c = CheckReport::new(2, "local-expectation equivalence");
    let oracle = uniform_maximal_matching_oracle();
    let mut graphs = 0usize;
    for n in 1..=6 {
        for g in connected_graphs(n) {
            graphs += 1;
            let input = LabeledGraph::anonymous(g.clone());
            let r = (|| -> Result<bool> {
                let lp = build_fractional_matching_lp(&g)?;
                let alg = local_expectation_algorithm("expected-matching", oracle.clone(), 1, whole_graph_completion(input.clone()));
                let local = point_from_labeling(&lp, &run_local(&alg, &input)?)?;
                let direct = dequantize(&lp, &oracle(&input)?)?;
                Ok(local == direct)
            })();
            if let Some(same) = record(&mut c, || describe(&g), r) {
                c.require(same, || format!("{}: local expectation differs from the dequantized oracle", describe(&g)));
            }
        }
    }

    let rand_oracle: Oracle = Arc::new(|g: &LabeledGraph| run_rand_local(&agreeing_seeds(), g, SeedMode::Exact));
    let (mut cycles, mut completions) = (0usize, 0usize);
    let mut values = BTreeSet::new();
    for t in 1..=2usize {
        let lengths: Vec<usize> = ((2 * t + 1).max(3)..=2 * t + 5).collect();
        for n in 2 * t + 2..=2 * t + 5 {
            cycles += 1;
            let input = LabeledGraph::anonymous(Graph::cycle(n));
            let r = (|| -> Result<Option<String>> {
                let lp = build_fractional_matching_lp(&input.graph)?;
                let direct = dequantize(&lp, &rand_oracle(&input)?)?;
                let mut first: Option<Labeling> = None;
                for &m in &lengths {
                    let alg = local_expectation_algorithm("agreeing-expectation", rand_oracle.clone(), t, cycle_completion(m, t)?);
                    let out = run_local(&alg, &input)?;
                    if point_from_labeling(&lp, &out)? != direct {
                        return Ok(Some(format!("completion to C{m} disagrees with the dequantized oracle")));
                    }
                    match &first {
                        None => first = Some(out),
                        Some(f) if *f != out => return Ok(Some(format!("completion to C{m} changes the node outputs"))),
                        Some(_) => {}
                    }
                }
                Ok(None)
            })();
            completions += lengths.len();
            match record(&mut c, || format!("C{n} at t={t}"), r) {
                Some(Some(msg)) => c.fail(format!("C{n} at t={t}: {msg}")),
                Some(None) => {
                    if let Ok(lp) = build_fractional_matching_lp(&input.graph) {
                        if let Ok(x) = rand_oracle(&input).and_then(|o| dequantize(&lp, &o)) {
                            values.extend(x.0.values().map(rational::format));
                        }
                    }
                }
                None => {}
            }
        }
    }
    c.set("graphs", graphs);
    c.set("cycles", cycles);
    c.set("cycle_completions", completions);
    c.set("cycle_edge_values", values.into_iter().join(","));
    c
}

/// Node count, edge count, sorted degrees and port count of a view.
type ViewKey = (usize, usize, Vec<usize>, usize);

/// Class representative: graph index, anchor, view and class size so far.
type Anchor = (usize, NodeId, View, usize);

fn view_key(v: &View) -> ViewKey {
    let g = &v.graph.graph;
    let mut degrees: Vec<usize> = (0..g.node_count()).map(|u| g.degree(u)).collect();
    degrees.sort_unstable();
    let port_count = v.ports.iter().map(Vec::len).sum();
    (g.node_count(), g.edge_count(), degrees, port_count)
}

/// Every anchor is compared with the first anchor of its view class; view
/// isomorphisms compose, so this covers every isomorphic pair.
pub fn non_signaling(seed: u64) -> CheckReport {
    let _ = seed;
    let mut c = CheckReport::new(3, "non-signaling");
    let graphs: Vec<LabeledGraph> =
        (1..=7).flat_map(graphs_up_to_iso).map(LabeledGraph::anonymous).collect();
    let (mut comparisons, mut pairs, mut classes_total) = (0usize, 0usize, 0usize);
    for t in 0..=2usize {
        let alg = seed_census(t);
        let mut outcomes = Vec::with_capacity(graphs.len());
        for g in &graphs {
            outcomes.push(record(&mut c, || format!("t={t} {}", describe(&g.graph)), run_rand_local(&alg, g, SeedMode::Exact)));
        }
        let mut classes: BTreeMap<ViewKey, Vec<Anchor>> = BTreeMap::new();
        for (gi, g) in graphs.iter().enumerate() {
            let Some(o_g) = &outcomes[gi] else { continue };
            for v in 0..g.graph.node_count() {
                let Some(view) = record(&mut c, || format!("view of {v}"), extract_view(g, &[v], t)) else { continue };
                let bucket = classes.entry(view_key(&view)).or_default();
                let Some(rep) = bucket.iter_mut().find(|r| views_isomorphic(&r.2, &view).is_some()) else {
                    bucket.push((gi, v, view, 1));
                    continue;
                };
                pairs += rep.3;
                rep.3 += 1;
                comparisons += 1;
                let (rg, rv) = (rep.0, rep.1);
                let o_rep = outcomes[rg].as_ref().expect("representatives have outcomes");
                let verdict = verify_non_signaling(o_rep, o_g, &[rv], &[v], t, DEFAULT_ISOMORPHISM_CAP);
                let what = || format!("t={t} anchor {rv} of {} vs anchor {v} of {}", describe(&graphs[rg].graph), describe(&g.graph));
                if let Some(verdict) = record(&mut c, what, verdict) {
                    c.require(verdict.ok, || format!("{}: {}", what(), verdict.mismatch.clone().unwrap_or_default()));
                    c.require(verdict.exhaustive, || format!("{}: isomorphism cap reached", what()));
                }
            }
        }
        classes_total += classes.values().map(Vec::len).sum::<usize>();
    }

    let mut planted_rejected = true;
    for t in 0..=1usize {
        let parity = |n: usize| {
            let g = Graph::cycle(n);
            let mut l = Labeling::uniform(&g, &(n % 2).to_string(), ANON);
            l.nodes.iter_mut().for_each(|x| *x = (n % 2).to_string());
            Outcome::deterministic(LabeledGraph::anonymous(g), l)
        };
        let r = (|| verify_non_signaling(&parity(4)?, &parity(5)?, &[0], &[0], t, DEFAULT_ISOMORPHISM_CAP))();
        match record(&mut c, || format!("planted parity outcome at t={t}"), r) {
            Some(v) => {
                planted_rejected &= !v.ok;
                c.require(!v.ok, || format!("planted parity outcome accepted at t={t}"));
            }
            None => planted_rejected = false,
        }
    }
    c.set("graphs", graphs.len());
    c.set("view_classes", classes_total);
    c.set("comparisons", comparisons);
    c.set("isomorphic_pairs", pairs);
    c.set("planted_rejected", planted_rejected);
    c
}

/// Accepted edge labelings of `inc`, enumerated as products of valid white
/// strings (a labeling with an invalid white string is never accepted).
fn accepted_labelings(p: &LinearizableProblem, inc: &IncidenceGraph) -> Result<Vec<Vec<String>>> {
    let sigma: Vec<String> = p.sigma.iter().cloned().collect();
    let per_white: Vec<Vec<Vec<String>>> = inc
        .whites
        .iter()
        .map(|&v| {
            let d = inc.graph.degree(v);
            (0..d)
                .map(|_| sigma.iter().cloned())
                .multi_cartesian_product()
                .filter(|s| p.white_ok(&s.iter().map(String::as_str).collect::<Vec<_>>()))
                .collect::<Vec<_>>()
        })
        .map(|strings| if strings.is_empty() { vec![Vec::new()] } else { strings })
        .collect();
    let mut out = Vec::new();
    for choice in per_white.iter().map(|s| s.iter()).multi_cartesian_product() {
        let mut lab = vec![String::new(); inc.graph.edge_count()];
        for (&v, s) in inc.whites.iter().zip(&choice) {
            for (&e, l) in inc.graph.adjacency(v).iter().zip(s.iter()) {
                lab[e] = l.clone();
            }
        }
        if verify_linearizable(p, inc, &lab)?.is_ok() {
            out.push(lab);
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Every labeling of `Σ^edges`, filtered by the verifier.
fn accepted_by_brute_force(p: &LinearizableProblem, inc: &IncidenceGraph) -> Result<Vec<Vec<String>>> {
    let sigma: Vec<String> = p.sigma.iter().cloned().collect();
    let mut out = Vec::new();
    for lab in (0..inc.graph.edge_count()).map(|_| sigma.iter().cloned()).multi_cartesian_product() {
        if verify_linearizable(p, inc, &lab)?.is_ok() {
            out.push(lab);
        }
    }
    if inc.graph.edge_count() == 0 && out.is_empty() && verify_linearizable(p, inc, &[])?.is_ok() {
        out.push(Vec::new());
    }
    out.sort();
    Ok(out)
}

/// Largest edge count of the incidence graph on which the accepted set is
/// also enumerated label by label.
pub const BRUTE_FORCE_EDGES: usize = 10;

/// Encoding then decoding returns every maximal matching, and every
/// accepted labeling decodes to a maximal matching.
pub fn matching_encoding(seed: u64) -> CheckReport {
    let _ = seed;
    let mut c = CheckReport::new(4, "matching encoding round trip");
    let p = LinearizableProblem::maximal_matching();
    let (mut graphs, mut matchings) = (0usize, 0usize);
    for n in 1..=6 {
        for g in graphs_up_to_iso(n) {
            graphs += 1;
            let inc = IncidenceGraph::from_graph(&g);
            for m in maximal_matchings(&g) {
                matchings += 1;
                let r = (|| -> Result<(bool, Vec<usize>)> {
                    let lab = encode_matching(&inc, &m)?;
                    let ok = verify_linearizable(&p, &inc, &lab)?.is_ok();
                    Ok((ok, decode_to_matching(&inc, &lab)?))
                })();
                if let Some((ok, back)) = record(&mut c, || format!("{} matching {m:?}", describe(&g)), r) {
                    c.require(ok, || format!("{}: encoding of {m:?} rejected", describe(&g)));
                    c.require(back == m, || format!("{}: {m:?} decoded to {back:?}", describe(&g)));
                }
            }
        }
    }

    let (mut small_graphs, mut accepted, mut cross_checked) = (0usize, 0usize, 0usize);
    for n in 1..=4 {
        for g in graphs_up_to_iso(n) {
            small_graphs += 1;
            let inc = IncidenceGraph::from_graph(&g);
            let Some(labs) = record(&mut c, || describe(&g), accepted_labelings(&p, &inc)) else { continue };
            if inc.graph.edge_count() <= BRUTE_FORCE_EDGES {
                cross_checked += 1;
                if let Some(brute) = record(&mut c, || describe(&g), accepted_by_brute_force(&p, &inc)) {
                    c.require(brute == labs, || format!("{}: factorized enumeration misses labelings", describe(&g)));
                }
            }
            for lab in labs {
                accepted += 1;
                if let Some(m) = record(&mut c, || format!("{} labeling {lab:?}", describe(&g)), decode_to_matching(&inc, &lab)) {
                    c.require(is_maximal_matching(&g, &m).is_none(), || {
                        format!("{}: {lab:?} decodes to the non-maximal {m:?}", describe(&g))
                    });
                }
            }
        }
    }
    c.set("graphs", graphs);
    c.set("maximal_matchings", matchings);
    c.set("small_graphs", small_graphs);
    c.set("accepted_labelings", accepted);
    c.set("brute_force_cross_checks", cross_checked);
    c
}

/// Greedy SLOCAL matchings on random graphs are 3-approximations of the
/// fractional optimum; bipartite optima are integral. Also returns every
/// observed locality.
pub fn factor_three(seed: u64) -> (CheckReport, Vec<usize>) {
    let mut c = CheckReport::new(5, "factor-3 bound");
    let mut rng = stream(seed, 5);
    let mut localities = Vec::new();
    let (mut runs, mut bipartite) = (0usize, 0usize);
    let mut worst: Option<Approximation> = None;
    let three = Approximation::Ratio(int(3));
    for _ in 0..RANDOM_GRAPHS {
        let n = rng.gen_range(1..=8);
        let g = random_graph(&mut rng, n);
        let input = LabeledGraph::anonymous(g.clone());
        let Some(lp) = record(&mut c, || describe(&g), build_fractional_matching_lp(&g)) else { continue };
        let opt = exact_opt(&lp);
        if is_bipartite(&g) {
            bipartite += 1;
            let integral = int(maximum_matching_size(&g) as i64);
            match &opt {
                LpOptimum::Optimal { value, .. } => c.require(*value == integral, || {
                    format!("{}: LP optimum {} but maximum matching {integral}", describe(&g), rational::format(value))
                }),
                other => c.fail(format!("{}: LP optimum {other:?}", describe(&g))),
            }
        }
        for _ in 0..ORDERS_PER_GRAPH {
            runs += 1;
            let order = random_order(&mut rng, n);
            let r = (|| -> Result<(usize, Vec<usize>, Approximation)> {
                let run = run_slocal(&GreedyMatching, &input, &order)?;
                let m = greedy_matching_edges(&g, &run.states);
                let a = approximation_against(&lp, &maximal_matching_to_fractional(&g, &m)?, &opt)?;
                Ok((run.locality, m, a))
            })();
            let Some((locality, m, a)) = record(&mut c, || format!("{} order {order:?}", describe(&g)), r) else { continue };
            localities.push(locality);
            c.require(is_maximal_matching(&g, &m).is_none(), || format!("{}: greedy matching {m:?} is not maximal", describe(&g)));
            c.require(a <= three, || format!("{} order {order:?}: ratio {a}", describe(&g)));
            worst = worst.max(Some(a));
        }
    }
    c.set("graphs", RANDOM_GRAPHS);
    c.set("runs", runs);
    c.set("bipartite_graphs", bipartite);
    c.set("worst_ratio", ratio_text(&worst));
    (c, localities)
}

/// Up to `limit` distinct node pairs, all of them when there are few.
fn mutation_pairs(rng: &mut ChaCha8Rng, n: usize, limit: usize) -> Vec<(NodeId, NodeId)> {
    let total = n * n.saturating_sub(1) / 2;
    if total <= limit {
        return (0..n).tuple_combinations().collect();
    }
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(limit);
    while out.len() < limit {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b && seen.insert((a.min(b), a.max(b))) {
            out.push((a.min(b), a.max(b)));
        }
    }
    out
}

/// Adds the edge `a b` if absent, removes it otherwise.
fn toggle(g: &Graph, a: NodeId, b: NodeId) -> Graph {
    let mut edges: Vec<(NodeId, NodeId)> = g.edges().to_vec();
    match g.find_edge(a, b) {
        Some(e) => {
            edges.remove(e);
        }
        None => edges.push((a, b)),
    }
    Graph::new(g.node_count(), edges).expect("toggling keeps the graph simple")
}

#[derive(Default)]
struct MutationTally {
    tried: usize,
    rejected: usize,
    sanctioned: usize,
    genuine: usize,
}

/// Failure kind of a mutation that the original witness does not certify
/// but that the recognizer accepted with a witness passing the independent
/// check: the mutant is itself a valid instance.
pub const GENUINE_MUTANT: &str = "accepted-mutant-is-valid";

/// Mutations of an octopus or proper instance. A mutation is expected to be
/// rejected unless the original witness still certifies it; accepted
/// mutants have their recognized witness checked independently.
fn mutate_decomposable(
    c: &mut CheckReport,
    rng: &mut ChaCha8Rng,
    g: &Graph,
    octopi: &[OctopusWitness],
    inter: &[NodeId],
    tally: &mut MutationTally,
    recognize: impl Fn(&Graph) -> Result<Option<(Vec<OctopusWitness>, Vec<NodeId>)>>,
) {
    for (a, b) in mutation_pairs(rng, g.node_count(), MUTATIONS_PER_INSTANCE) {
        tally.tried += 1;
        let h = toggle(g, a, b);
        let sanctioned = verify_witness(&h, octopi, inter).is_ok();
        tally.sanctioned += usize::from(sanctioned);
        let what = || format!("{} toggled {a}-{b}", describe(g));
        let Some(found) = record(c, what, recognize(&h)) else { continue };
        match (found, sanctioned) {
            (None, false) => tally.rejected += 1,
            (Some(_), true) => {}
            (None, true) => c.fail(format!("{}: rejected although the original witness certifies it", what())),
            (Some((o, i)), false) => match verify_witness(&h, &o, &i) {
                Ok(()) => {
                    tally.genuine += 1;
                    c.fail_as(GENUINE_MUTANT, format!("{}: accepted; the mutant has a valid witness of its own", what()))
                }
                Err(why) => c.fail(format!("{}: accepted with an invalid witness: {why}", what())),
            },
        }
    }
}

/// Generator and recognizer agree on tree-like gadgets, octopi and proper
/// instances, single-edge mutations are rejected, and proper instances
/// obey the size law.
pub fn gadget_laws(seed: u64) -> CheckReport {
    let mut c = CheckReport::new(6, "gadget laws");
    let mut rng = stream(seed, 6);
    let mut tally = MutationTally::default();

    for h in 1..=5 {
        let Some(t) = record(&mut c, || format!("tree-like height {h}"), gen_tree_like(h)) else { continue };
        let back = recognize_tree_like(&t.graph);
        c.require(back.as_ref().is_some_and(|b| b.height == h), || format!("tree-like height {h} not recognized"));
        // A mutation changes the edge count, which fixes the height.
        for (a, b) in mutation_pairs(&mut rng, t.graph.node_count(), MUTATIONS_PER_INSTANCE) {
            tally.tried += 1;
            let accepted = recognize_tree_like(&toggle(&t.graph, a, b)).is_some();
            tally.rejected += usize::from(!accepted);
            c.require(!accepted, || format!("tree-like height {h} toggled {a}-{b} still recognized"));
        }
    }

    let mut octopi = 0usize;
    for x in 1..=3usize {
        for eta in (0..1usize << (x - 1)).map(|_| [1usize, 2]).multi_cartesian_product() {
            octopi += 1;
            let weights: BTreeMap<(usize, usize), usize> = eta
                .iter()
                .enumerate()
                .flat_map(|(i, &e)| (1..=e).map(move |j| (i, j)))
                .map(|ij| (ij, rng.gen_range(1..=3)))
                .collect();
            let what = || format!("octopus x={x} eta={eta:?}");
            let Some(o) = record(&mut c, what, gen_octopus(x, &eta, &weights)) else { continue };
            if let Some(found) = record(&mut c, what, recognize_octopus(&o.graph)) {
                match found {
                    Some(w) => {
                        c.require(w.x == x && w.eta == eta, || format!("{}: recognized as x={} eta={:?}", what(), w.x, w.eta));
                        c.require(verify_witness(&o.graph, &[w], &[]).is_ok(), || format!("{}: witness fails", what()));
                    }
                    None => c.fail(format!("{}: not recognized", what())),
                }
            }
            mutate_decomposable(&mut c, &mut rng, &o.graph, std::slice::from_ref(&o.witness), &[], &mut tally, |h| {
                Ok(recognize_octopus(h)?.map(|w| (vec![w], Vec::new())))
            });
        }
    }

    let (mut proper, mut max_nodes) = (0usize, 0usize);
    for i in 0..RANDOM_INCIDENCE_GRAPHS {
        let inc = random_incidence(&mut rng, 6, 6);
        let n = inc.graph.node_count();
        let Some((pi, _)) = record(&mut c, || format!("incidence graph {i}"), gen_proper_instance(&inc, None)) else { continue };
        proper += 1;
        let big_n = pi.graph.node_count();
        max_nodes = max_nodes.max(big_n);
        c.require(n <= big_n && big_n <= n * n * n, || format!("incidence graph {i}: n={n} but N={big_n}"));
        match record(&mut c, || format!("proper instance {i}"), recognize_proper_instance(&pi.graph)) {
            Some(Some(r)) => c.require(
                r.octopi.len() == pi.octopi.len() && r.inter.len() == pi.inter.len(),
                || format!("proper instance {i}: recognized {} octopi, {} inter nodes", r.octopi.len(), r.inter.len()),
            ),
            Some(None) => c.fail(format!("proper instance {i}: not recognized")),
            None => {}
        }
        mutate_decomposable(&mut c, &mut rng, &pi.graph, &pi.octopi, &pi.inter, &mut tally, |h| {
            Ok(recognize_proper_instance(h)?.map(|r| (r.octopi, r.inter)))
        });
    }
    c.set("tree_like_heights", 5);
    c.set("octopi", octopi);
    c.set("proper_instances", proper);
    c.set("largest_proper_instance", max_nodes);
    c.set("mutations", tally.tried);
    c.set("mutations_rejected", tally.rejected);
    c.set("mutations_still_certified", tally.sanctioned);
    c.set("mutations_accepted_as_valid", tally.genuine);
    c
}

fn accepts_linearizable(p: &LinearizableProblem, inc: &IncidenceGraph, lab: &[String]) -> Result<bool> {
    if lab.iter().any(|l| !p.sigma.contains(l)) {
        return Ok(false);
    }
    Ok(verify_linearizable(p, inc, lab)?.is_ok())
}

fn node_labeling(pi: &ProperInstance, labels: Vec<String>) -> Labeling {
    Labeling { nodes: labels, half_edges: vec![[ANON.to_string(), ANON.to_string()]; pi.graph.edge_count()] }
}

/// Same label on every node of a port gadget, chosen at random per port.
fn port_uniform_labels(rng: &mut ChaCha8Rng, pi: &ProperInstance, sigma: &[String]) -> Vec<String> {
    let mut labels = vec![BOTTOM.to_string(); pi.graph.node_count()];
    for oct in &pi.octopi {
        for port in &oct.ports {
            let l = sigma.choose(rng).expect("alphabet is nonempty");
            for &v in &port.gadget.nodes {
                labels[v] = l.clone();
            }
        }
    }
    labels
}

/// Failure kind of a mixture whose pullback gains mass: the source has an
/// isolated white, whose padded port the promise checks and the pullback
/// drops.
pub const PADDED_PORT_MASS: &str = "padded-port-mass";

/// Lifted greedy matching on proper instances of every small graph, in
/// every processing order. Also returns every observed locality.
pub fn lift_end_to_end(seed: u64) -> (CheckReport, Vec<usize>) {
    let mut c = CheckReport::new(7, "lift end-to-end");
    let mut rng = stream(seed, 7);
    let p = LinearizableProblem::maximal_matching();
    let sigma: Vec<String> = p.sigma.iter().cloned().collect();
    let mut localities = Vec::new();
    let (mut instances, mut runs, mut mixtures) = (0usize, 0usize, 0usize);
    let mut probabilities = BTreeSet::new();
    for n in 1..=5 {
        for g in graphs_up_to_iso(n) {
            instances += 1;
            let inc = IncidenceGraph::from_graph(&g);
            let Some((pi, map)) = record(&mut c, || describe(&g), gen_proper_instance(&inc, None)) else { continue };
            let mut outputs = BTreeSet::new();
            for order in (0..n).permutations(n) {
                runs += 1;
                let what = || format!("{} order {order:?}", describe(&g));
                let r = (|| -> Result<_> {
                    let run = lift_slocal_algorithm(&pi, &order)?;
                    let promise = verify_pi_promise(&pi, &run.labels, &p)?;
                    let back = pullback_labeling(&map, &inc, &run.labels)?;
                    let lin = verify_linearizable(&p, &inc, &back)?.is_ok();
                    let m = decode_to_matching(&inc, &back)?;
                    Ok((run, promise, lin, m))
                })();
                let Some((run, promise, lin, m)) = record(&mut c, what, r) else { continue };
                localities.push(run.locality_hat);
                c.require(promise.is_ok(), || format!("{}: promise violated: {:?}", what(), promise.violations));
                c.require(lin, || format!("{}: pullback rejected", what()));
                c.require(is_maximal_matching(&g, &m).is_none(), || format!("{}: {m:?} is not maximal", what()));
                c.require(run.locality_g <= run.locality_bound, || {
                    format!("{}: locality {} above {}", what(), run.locality_g, run.locality_bound)
                });
                outputs.insert(run.labels);
            }

            mixtures += 1;
            let mut labelings: Vec<Vec<String>> = outputs.into_iter().collect();
            labelings.push(port_uniform_labels(&mut rng, &pi, &sigma));
            labelings.push(port_uniform_labels(&mut rng, &pi, &sigma));
            let weights = random_weights(&mut rng, labelings.len());
            let r = (|| -> Result<(Rational, Rational)> {
                let entries = labelings.into_iter().map(|l| node_labeling(&pi, l)).zip(weights);
                let o = Outcome::new(pi.family.clone(), entries)?;
                let before = o.try_success_probability(|l| Ok(verify_pi_promise(&pi, &l.nodes, &p)?.is_ok()))?;
                let pulled = pullback_outcome(&o, &map, &inc)?;
                let after = pulled.try_success_probability(|l| {
                    let lab: Vec<String> = l.half_edges.iter().map(|h| h[0].clone()).collect();
                    accepts_linearizable(&p, &inc, &lab)
                })?;
                Ok((before, after))
            })();
            if let Some((before, after)) = record(&mut c, || format!("{} mixture", describe(&g)), r) {
                if before != after {
                    let padded = inc.whites.iter().any(|&v| inc.graph.degree(v) == 0);
                    let kind = if padded && after > before { PADDED_PORT_MASS } else { "error" };
                    c.fail_as(
                        kind,
                        format!(
                            "{}: success probability {} before pullback, {} after",
                            describe(&g),
                            rational::format(&before),
                            rational::format(&after)
                        ),
                    );
                }
                probabilities.insert(before);
            }
        }
    }
    c.set("instances", instances);
    c.set("orders", runs);
    c.set("mixtures", mixtures);
    c.set(
        "mixture_success_range",
        match (probabilities.first(), probabilities.last()) {
            (Some(a), Some(b)) => format!("{}..{}", rational::format(a), rational::format(b)),
            _ => "none".to_string(),
        },
    );
    (c, localities)
}

/// Every greedy run in the factor-3 and lift checks queried radius 1.
pub fn greedy_locality(factor_three: &[usize], lift: &[usize]) -> CheckReport {
    let mut c = CheckReport::new(8, "greedy SLOCAL locality");
    for (name, runs) in [("factor-3", factor_three), ("lift", lift)] {
        let off: Vec<usize> = runs.iter().copied().filter(|&l| l != 1).collect();
        c.require(off.is_empty(), || format!("{name}: {} runs with locality other than 1: {:?}", off.len(), off.iter().take(5).collect::<Vec<_>>()));
        c.require(!runs.is_empty(), || format!("{name}: no runs recorded"));
        let distinct: BTreeSet<usize> = runs.iter().copied().collect();
        c.set(&format!("{name}_runs"), runs.len());
        c.set(&format!("{name}_localities"), distinct.iter().join(","));
    }
    c
}
