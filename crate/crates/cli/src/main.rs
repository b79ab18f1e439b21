use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nslab_cli::{CliError, Response};
use serde::de::DeserializeOwned;

/// Exact laboratory for distributed graph computation.
#[derive(Parser)]
#[command(name = "nslab", version)]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Also write a Graphviz rendering of the main graph here.
    #[arg(long, global = true, value_name = "PATH")]
    dot: Option<PathBuf>,
    /// Seed for corpus generation and sampling.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Locally checkable labelings.
    #[command(subcommand)]
    Lcl(Lcl),
    /// LOCAL, randomized LOCAL and SLOCAL simulators.
    #[command(subcommand)]
    Sim(Sim),
    /// Non-signaling verification.
    #[command(subcommand)]
    Ns(Ns),
    /// Distributed linear programs.
    #[command(subcommand)]
    Lp(Lp),
    /// Linearizable problems and the maximal-matching encoding.
    #[command(subcommand)]
    Lin(Lin),
    /// Tree-like and octopus gadgets.
    #[command(subcommand)]
    Gadget(Gadget),
    /// Proper instances and the lifted greedy matching.
    #[command(subcommand)]
    Lift(Lift),
    /// Run an acceptance suite and write its report.
    Suite {
        name: String,
        /// Directory for report.json, report.txt and timings.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Lcl {
    /// Check an output labeling against a problem.
    Verify {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Collect the balls of a graph into a constraint set.
    Balls {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        radius: usize,
        #[arg(long)]
        max_degree: usize,
    },
}

#[derive(Args)]
struct AlgorithmArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Built-in algorithm name.
    #[arg(long)]
    algorithm: String,
    /// Locality.
    #[arg(short = 'T', default_value_t = 1)]
    t: usize,
}

#[derive(Subcommand)]
enum Sim {
    /// Run a deterministic algorithm.
    Local(AlgorithmArgs),
    /// Output distribution of a randomized algorithm.
    RandLocal {
        #[command(flatten)]
        alg: AlgorithmArgs,
        /// Number of sampled seed assignments.
        #[arg(long, conflicts_with = "exact")]
        seeds: Option<usize>,
        /// Enumerate every seed assignment (the default).
        #[arg(long)]
        exact: bool,
    },
    /// Run a sequential algorithm in the given node order.
    Slocal {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value = "greedy-matching")]
        algorithm: String,
        #[arg(long, value_delimiter = ',')]
        order: Vec<usize>,
    },
}

#[derive(Subcommand)]
enum Ns {
    /// Compare the marginals of two outcomes on anchors with isomorphic views.
    Verify {
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        h: PathBuf,
        #[arg(long, value_delimiter = ',')]
        ag: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        ah: Vec<usize>,
        #[arg(short = 'T')]
        t: usize,
    },
}

#[derive(Subcommand)]
enum Lp {
    /// The fractional matching LP of a graph.
    Build {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Exact optimum.
    Opt {
        #[arg(long)]
        lp: PathBuf,
    },
    /// Feasibility of a point.
    Check {
        #[arg(long)]
        lp: PathBuf,
        #[arg(long)]
        point: PathBuf,
    },
    /// Approximation ratio of a point.
    Ratio {
        #[arg(long)]
        lp: PathBuf,
        #[arg(long)]
        point: PathBuf,
    },
    /// Expected point of an outcome.
    Dequantize {
        #[arg(long)]
        lp: PathBuf,
        #[arg(long)]
        outcome: PathBuf,
    },
}

#[derive(Subcommand)]
enum Lin {
    /// Check edge labels of an incidence graph.
    Verify {
        /// Defaults to the maximal-matching encoding.
        #[arg(long)]
        problem: Option<PathBuf>,
        #[arg(long)]
        incidence: PathBuf,
        #[arg(long)]
        labels: PathBuf,
    },
    /// Encode a maximal matching given as black indices.
    Encode {
        #[arg(long)]
        incidence: PathBuf,
        #[arg(long, value_delimiter = ',')]
        matching: Vec<usize>,
    },
    /// Decode a valid labeling to its matching.
    Decode {
        #[arg(long)]
        incidence: PathBuf,
        #[arg(long)]
        labels: PathBuf,
    },
    /// Greedy maximal matching in the given node order.
    Greedy {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_delimiter = ',')]
        order: Vec<usize>,
    },
}

#[derive(Subcommand)]
enum Gadget {
    /// Tree-like gadget of the given height.
    Tree {
        #[arg(long)]
        height: usize,
    },
    /// Octopus with head height x, port counts eta and port heights.
    Octopus {
        #[arg(long)]
        x: usize,
        #[arg(long, value_delimiter = ',')]
        eta: Vec<usize>,
        /// Port heights in (i, j) order.
        #[arg(long, value_delimiter = ',')]
        weights: Vec<usize>,
    },
}

#[derive(Subcommand)]
enum Lift {
    /// Proper instance built from an incidence graph.
    Build {
        #[arg(long)]
        incidence: PathBuf,
        /// Port gadget height.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Lifted greedy matching.
    Run {
        #[arg(long)]
        instance: PathBuf,
        /// Octopus order; defaults to index order.
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<usize>>,
    },
    /// Pull node labels back to edge labels of the source.
    Pullback {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        labels: PathBuf,
    },
    /// Check node labels against the promise problem.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        problem: Option<PathBuf>,
    },
}

fn read<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("cannot parse {}: {e}", path.display())))
}

fn read_opt<T: DeserializeOwned>(path: Option<&PathBuf>) -> Result<Option<T>, CliError> {
    path.map(|p| read(p)).transpose()
}

/// Labels of a node-labeled instance: either a bare array or `{"labels": [...]}`
/// as printed by `lift run`.
fn read_node_labels(path: &Path) -> Result<Vec<String>, CliError> {
    #[derive(serde::Deserialize)]
    #[serde(untagged)]
    enum NodeLabels {
        Bare(Vec<String>),
        Run { labels: Vec<String> },
    }
    Ok(match read(path)? {
        NodeLabels::Bare(l) | NodeLabels::Run { labels: l } => l,
    })
}

fn dispatch(cli: &Cli) -> Result<Response, CliError> {
    use nslab_cli as c;
    match &cli.command {
        Command::Lcl(Lcl::Verify { problem, graph, output }) => c::lcl_verify(&read(problem)?, &read(graph)?, &read(output)?),
        Command::Lcl(Lcl::Balls { graph, radius, max_degree }) => c::lcl_balls(&read(graph)?, *radius, *max_degree),
        Command::Sim(Sim::Local(a)) => c::sim_local(&read(&a.graph)?, &a.algorithm, a.t),
        Command::Sim(Sim::RandLocal { alg, seeds, .. }) => {
            c::sim_rand_local(&read(&alg.graph)?, &alg.algorithm, alg.t, *seeds, cli.seed)
        }
        Command::Sim(Sim::Slocal { graph, algorithm, order }) => c::sim_slocal(&read(graph)?, algorithm, order),
        Command::Ns(Ns::Verify { g, h, ag, ah, t }) => c::ns_verify(&read(g)?, &read(h)?, ag, ah, *t),
        Command::Lp(Lp::Build { graph }) => c::lp_build(&read(graph)?),
        Command::Lp(Lp::Opt { lp }) => c::lp_opt(&read(lp)?),
        Command::Lp(Lp::Check { lp, point }) => c::lp_check(&read(lp)?, &read(point)?),
        Command::Lp(Lp::Ratio { lp, point }) => c::lp_ratio(&read(lp)?, &read(point)?),
        Command::Lp(Lp::Dequantize { lp, outcome }) => c::lp_dequantize(&read(lp)?, &read(outcome)?),
        Command::Lin(Lin::Verify { problem, incidence, labels }) => {
            c::lin_verify(read_opt(problem.as_ref())?.as_ref(), &read(incidence)?, &read::<BTreeMap<usize, String>>(labels)?)
        }
        Command::Lin(Lin::Encode { incidence, matching }) => c::lin_encode(&read(incidence)?, matching),
        Command::Lin(Lin::Decode { incidence, labels }) => c::lin_decode(&read(incidence)?, &read(labels)?),
        Command::Lin(Lin::Greedy { graph, order }) => c::lin_greedy(&read(graph)?, order),
        Command::Gadget(Gadget::Tree { height }) => c::gadget_tree(*height),
        Command::Gadget(Gadget::Octopus { x, eta, weights }) => c::gadget_octopus(*x, eta, weights),
        Command::Lift(Lift::Build { incidence, k }) => c::lift_build(&read(incidence)?, *k),
        Command::Lift(Lift::Run { instance, order }) => c::lift_run(&read(instance)?, order.as_deref()),
        Command::Lift(Lift::Pullback { instance, source, labels }) => {
            c::lift_pullback(&read(instance)?, &read(source)?, &read_node_labels(labels)?)
        }
        Command::Lift(Lift::Verify { instance, labels, problem }) => {
            c::lift_verify(&read(instance)?, &read_node_labels(labels)?, read_opt(problem.as_ref())?.as_ref())
        }
        Command::Suite { name, out } => c::suite(name, cli.seed, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let response = match dispatch(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let (Some(path), Some(dot)) = (&cli.dot, &response.dot) {
        if let Err(e) = fs::write(path, dot) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&response.json).expect("values serialize"));
    } else {
        println!("{}", response.text);
    }
    if response.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
