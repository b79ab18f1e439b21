use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use nslab_core::gadgets::ProperInstanceJson;
use nslab_core::graph::{Graph, GraphJson};
use nslab_core::lp::LpJson;
use nslab_core::outcome::OutcomeJson;
use serde_json::Value;
use tempfile::TempDir;

fn nslab(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_nslab")).args(args).output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json_of(args: &[&str]) -> Value {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let (code, stdout, stderr) = nslab(&all);
    assert_eq!(code, 0, "{args:?}: {stderr}");
    serde_json::from_str(&stdout).unwrap()
}

fn write(dir: &Path, name: &str, value: &impl serde::Serialize) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string(value).unwrap()).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn path4(dir: &Path) -> PathBuf {
    write(dir, "p4.json", &GraphJson::from_graph(&Graph::path(4)))
}

#[test]
fn gadget_verbs_match_the_library() {
    assert_eq!(json_of(&["gadget", "tree", "--height", "3"]), nslab_cli::gadget_tree(3).unwrap().json);
    assert_eq!(
        json_of(&["gadget", "octopus", "--x", "2", "--eta", "2,1", "--weights", "1,2,1"]),
        nslab_cli::gadget_octopus(2, &[2, 1], &[1, 2, 1]).unwrap().json
    );
}

#[test]
fn lin_verbs_round_trip() {
    let dir = TempDir::new().unwrap();
    let g = path4(dir.path());
    let greedy = json_of(&["lin", "greedy", "--graph", s(&g), "--order", "1,0,2,3"]);
    let gj: GraphJson = serde_json::from_str(&fs::read_to_string(&g).unwrap()).unwrap();
    assert_eq!(greedy, nslab_cli::lin_greedy(&gj, &[1, 0, 2, 3]).unwrap().json);
    assert_eq!(greedy["matching"], serde_json::json!([0, 2]));

    let inc = write(dir.path(), "inc.json", &greedy["incidence"]);
    let labels = write(dir.path(), "labels.json", &greedy["labels"]);
    let (code, stdout, _) = nslab(&["lin", "verify", "--incidence", s(&inc), "--labels", s(&labels)]);
    assert_eq!((code, stdout.trim()), (0, "valid"));
    // Edges 0 and 2 of the path are blacks 0 and 2 of the incidence graph.
    assert_eq!(json_of(&["lin", "decode", "--incidence", s(&inc), "--labels", s(&labels)])["matching"], serde_json::json!([0, 2]));
    assert_eq!(json_of(&["lin", "encode", "--incidence", s(&inc), "--matching", "0,2"]), greedy["labels"]);
}

#[test]
fn rejected_labelings_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let g = path4(dir.path());
    let greedy = json_of(&["lin", "greedy", "--graph", s(&g), "--order", "0,1,2,3"]);
    let inc = write(dir.path(), "inc.json", &greedy["incidence"]);
    let mut bad: BTreeMap<String, String> = serde_json::from_value(greedy["labels"].clone()).unwrap();
    for v in bad.values_mut() {
        *v = "Ptr".into();
    }
    let labels = write(dir.path(), "bad.json", &bad);
    let (code, stdout, _) = nslab(&["lin", "verify", "--incidence", s(&inc), "--labels", s(&labels)]);
    assert_eq!(code, 1);
    assert!(stdout.starts_with("invalid"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(nslab(&["suite", "no-such-suite"]).0, 2);
    assert_eq!(nslab(&["no-such-verb"]).0, 2);
    assert_eq!(nslab(&["lp", "opt", "--lp", "/nonexistent/lp.json"]).0, 2);
    assert_eq!(nslab(&["gadget", "tree", "--height", "0"]).0, 2);
}

#[test]
fn lift_pipeline_matches_the_library() {
    let dir = TempDir::new().unwrap();
    let g = path4(dir.path());
    let built = json_of(&["lift", "build", "--incidence", s(&g), "--k", "1"]);
    let gj: GraphJson = serde_json::from_str(&fs::read_to_string(&g).unwrap()).unwrap();
    assert_eq!(built, nslab_cli::lift_build(&gj, Some(1)).unwrap().json);

    let pi = write(dir.path(), "pi.json", &built);
    let run = json_of(&["lift", "run", "--instance", s(&pi)]);
    let pij: ProperInstanceJson = serde_json::from_value(built).unwrap();
    assert_eq!(run, nslab_cli::lift_run(&pij, None).unwrap().json);

    let out = write(dir.path(), "run.json", &run);
    let (code, stdout, _) = nslab(&["lift", "verify", "--instance", s(&pi), "--labels", s(&out)]);
    assert_eq!((code, stdout.trim()), (0, "valid"));
    let labels: Vec<String> = serde_json::from_value(run["labels"].clone()).unwrap();
    assert_eq!(
        json_of(&["lift", "pullback", "--instance", s(&pi), "--source", s(&g), "--labels", s(&out)]),
        nslab_cli::lift_pullback(&pij, &gj, &labels).unwrap().json
    );
}

#[test]
fn lp_and_simulation_verbs_match_the_library() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "c4.json", &GraphJson::from_graph(&Graph::cycle(4)));
    let lp = json_of(&["lp", "build", "--graph", s(&g)]);
    let lp_path = write(dir.path(), "lp.json", &lp);
    let lpj: LpJson = serde_json::from_value(lp).unwrap();
    assert_eq!(json_of(&["lp", "opt", "--lp", s(&lp_path)]), nslab_cli::lp_opt(&lpj).unwrap().json);

    let outcome = json_of(&["sim", "rand-local", "--graph", s(&g), "--algorithm", "agreeing-seeds", "--exact"]);
    let gj: GraphJson = serde_json::from_str(&fs::read_to_string(&g).unwrap()).unwrap();
    assert_eq!(outcome, nslab_cli::sim_rand_local(&gj, "agreeing-seeds", 1, None, 7).unwrap().json);
    let o_path = write(dir.path(), "o.json", &outcome);
    let oj: OutcomeJson = serde_json::from_value(outcome).unwrap();
    let deq = json_of(&["lp", "dequantize", "--lp", s(&lp_path), "--outcome", s(&o_path)]);
    assert_eq!(deq, nslab_cli::lp_dequantize(&lpj, &oj).unwrap().json);
    // Each edge is 1/2 with probability 1/2.
    assert_eq!(deq["objective"], "1");

    let point = write(dir.path(), "x.json", &deq["point"]);
    assert_eq!(nslab(&["lp", "check", "--lp", s(&lp_path), "--point", s(&point)]).0, 0);
    assert_eq!(json_of(&["lp", "ratio", "--lp", s(&lp_path), "--point", s(&point)])["ratio"], "2");

    let (code, stdout, _) = nslab(&["ns", "verify", "--g", s(&o_path), "--h", s(&o_path), "--ag", "0", "--ah", "2", "-T", "1"]);
    assert_eq!(code, 0, "{stdout}");
}

#[test]
fn dot_flag_writes_the_rendering() {
    let dir = TempDir::new().unwrap();
    let dot = dir.path().join("g.dot");
    let (code, _, _) = nslab(&["gadget", "tree", "--height", "2", "--dot", s(&dot)]);
    assert_eq!(code, 0);
    assert_eq!(fs::read_to_string(&dot).unwrap(), nslab_cli::gadget_tree(2).unwrap().dot.unwrap());
}

#[test]
fn suite_writes_reports() {
    let dir = TempDir::new().unwrap();
    let (code, stdout, _) = nslab(&["suite", "encoding", "--seed", "7", "--out", s(dir.path())]);
    assert_eq!(code, 0);
    assert!(stdout.contains("PASS [4]"));
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["checks"][0]["failure_count"], 0);
    assert_eq!(fs::read_to_string(dir.path().join("report.txt")).unwrap().trim_end(), stdout.trim_end());
}

#[test]
fn lcl_verbs_accept_own_balls_and_flag_changes() {
    use nslab_core::graph::{LabeledGraph, Labeling, ANON};
    use nslab_core::lcl::{product_alphabet, ConstraintSet, LclProblem, LclProblemJson};
    use nslab_core::outcome::LabelsJson;
    use std::collections::BTreeSet;

    let set = |xs: &[&str]| xs.iter().map(|x| x.to_string()).collect::<BTreeSet<String>>();
    let (anon, nodes_out, edges_out) = (set(&[ANON]), set(&["a", "b"]), set(&["x"]));
    let problem_with = |c: ConstraintSet| LclProblem::new(anon.clone(), anon.clone(), nodes_out.clone(), edges_out.clone(), c).unwrap();

    let dir = TempDir::new().unwrap();
    let input = LabeledGraph::anonymous(Graph::cycle(4));
    let g = write(dir.path(), "c4.json", &GraphJson::from_labeled(&input));
    let mut out = Labeling::uniform(&input.graph, "a", "x");
    out.nodes[0] = "b".into();
    // Constraints: exactly the radius-1 balls of this solution.
    let empty = ConstraintSet::empty(1, 2, product_alphabet(&anon, &nodes_out), product_alphabet(&anon, &edges_out));
    let product = problem_with(empty).product(&input, &out).unwrap();
    let problem = problem_with(ConstraintSet::from_balls_of(&product, 1, 2).unwrap());

    let p = write(dir.path(), "p.json", &LclProblemJson::from_problem(&problem));
    let o = write(dir.path(), "o.json", &LabelsJson::from_labeling(&input, &out));
    let (code, stdout, _) = nslab(&["lcl", "verify", "--problem", s(&p), "--graph", s(&g), "--output", s(&o)]);
    assert_eq!((code, stdout.trim()), (0, "valid"));

    // Two adjacent `b` nodes never occur in the balls.
    out.nodes[1] = "b".into();
    let o = write(dir.path(), "o2.json", &LabelsJson::from_labeling(&input, &out));
    let (code, stdout, _) = nslab(&["--json", "lcl", "verify", "--problem", s(&p), "--graph", s(&g), "--output", s(&o)]);
    assert_eq!(code, 1);
    let verdict: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(verdict["violations"], serde_json::json!([0, 1]));

    let balls = json_of(&["lcl", "balls", "--graph", s(&g), "--radius", "1", "--max-degree", "2"]);
    let gj: GraphJson = serde_json::from_str(&fs::read_to_string(&g).unwrap()).unwrap();
    assert_eq!(balls, nslab_cli::lcl_balls(&gj, 1, 2).unwrap().json);
    assert_eq!(balls["members"].as_array().unwrap().len(), 1);
}
