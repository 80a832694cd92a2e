//! Command-line surface for the hiertopo toolkit: build and export graphs,
//! compute invariants, cuts and spectra, run spreading experiments, place
//! circuits, and compare topologies by Pareto dominance.
//!
//! Exit codes: 0 success, 1 computation error, 2 usage error. All
//! randomized subcommands require an explicit seed and echo it in the
//! output together with a hash of the input, so runs can be reproduced
//! bit for bit.

mod pareto;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hiertopo::closed_forms::{truncated_node_count, BaseInvariants, Regime};
use hiertopo::ghz::{
    derive_seeds, ghz_trials, probability_weights, weighted_center, ProbGraph, GENERATOR_FAMILY,
};
use hiertopo::graph::{CheegerMode, Graph};
use hiertopo::placement::{circuit_graph, naive_placement, parse_gate_list, place};
use hiertopo::products::{build_hierarchy, HierarchySpec};
use hiertopo::spectral::{dense_spectrum, recursive_spectrum, Spectrum};

#[derive(Parser)]
#[command(name = "hiertopo", version, about = "Hierarchical-product network topology toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a standard graph or a hierarchy and emit graph JSON or DOT.
    Build(BuildArgs),
    /// Structural invariants of a graph.
    Invariants(GraphInput),
    /// Cheeger constant and witness cut.
    Cheeger(CheegerArgs),
    /// Laplacian spectrum, dense or by the hierarchy recursion.
    Spectrum(SpectrumArgs),
    /// Closed-form hierarchy invariants from base-graph measurements.
    Formulas(FormulasArgs),
    /// Probabilistic spreading benchmark.
    Ghz(GhzArgs),
    /// Partition-and-rotate circuit placement.
    Place(PlaceArgs),
    /// Non-dominated subset of measured topology metrics.
    Pareto(ParetoArgs),
}

#[derive(Args)]
struct BuildArgs {
    /// Standard graph family.
    #[arg(long, value_enum, required_unless_present = "spec")]
    kind: Option<Kind>,
    /// Node count for complete, cycle and star graphs.
    #[arg(
        long,
        required_if_eq_any([("kind", "complete"), ("kind", "cycle"), ("kind", "star")])
    )]
    n: Option<usize>,
    /// Grid dimension.
    #[arg(long, required_if_eq("kind", "grid"))]
    d: Option<usize>,
    /// Grid side length.
    #[arg(long, required_if_eq("kind", "grid"))]
    side: Option<usize>,
    /// Porcupine module count.
    #[arg(long, required_if_eq("kind", "porcupine"))]
    m: Option<usize>,
    /// Hierarchy spec JSON file (alternative to --kind).
    #[arg(long, conflicts_with = "kind")]
    spec: Option<PathBuf>,
    /// Emit DOT instead of graph JSON.
    #[arg(long)]
    dot: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Complete,
    Cycle,
    Star,
    Grid,
    Porcupine,
}

#[derive(Args)]
struct GraphInput {
    /// Graph JSON file.
    #[arg(long, required_unless_present = "spec", conflicts_with = "spec")]
    graph: Option<PathBuf>,
    /// Hierarchy spec JSON file; the graph is built in process.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheegerArgs {
    #[command(flatten)]
    input: GraphInput,
    #[arg(long, value_enum, default_value = "exact")]
    mode: Mode,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Heuristic,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    input: GraphInput,
    /// recursive needs --spec; dense accepts either input.
    #[arg(long, value_enum, default_value = "recursive")]
    method: Method,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Recursive,
    Dense,
}

#[derive(Args)]
struct FormulasArgs {
    /// Hierarchy spec JSON file with equal bases.
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GhzArgs {
    /// Hierarchy spec JSON file; probabilities decay by --alpha per level.
    #[arg(long, required_unless_present = "graph", conflicts_with = "graph")]
    spec: Option<PathBuf>,
    /// Graph JSON file; every edge gets probability --p0.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Base success probability.
    #[arg(long)]
    p0: f64,
    /// Per-level probability decay (spec input only).
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long)]
    trials: usize,
    #[arg(long)]
    seed: u64,
    /// Start node index, or "center" for the weighted center.
    #[arg(long, default_value = "center")]
    start: String,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Emit a CSV row instead of JSON.
    #[arg(long)]
    csv: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlaceArgs {
    /// Machine hierarchy spec JSON (equal complete bases, unit weights).
    #[arg(long)]
    machine: PathBuf,
    /// Gate list file: one `u v` pair per line, `#` comments.
    #[arg(long)]
    gates: PathBuf,
    #[arg(long)]
    seed: u64,
    /// Number of independently seeded placements.
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ParetoArgs {
    /// JSON array of metric records:
    /// {"label", "n", "weighted_diameter", "max_degree", "total_edge_weight"}.
    #[arg(long)]
    records: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Build(args) => build(args),
        Command::Invariants(args) => invariants(args),
        Command::Cheeger(args) => cheeger(args),
        Command::Spectrum(args) => spectrum(args),
        Command::Formulas(args) => formulas(args),
        Command::Ghz(args) => ghz(args),
        Command::Place(args) => place_cmd(args),
        Command::Pareto(args) => pareto_cmd(args),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(text: String, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            println!("{}", text);
            Ok(())
        }
    }
}

/// Stable 64-bit FNV-1a content hash for reproducibility metadata.
fn content_hash(text: &str) -> String {
    let mut hash: u64 = 0xcbf29ce484222325;
    for byte in text.as_bytes() {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(0x100000001b3);
    }
    format!("{:016x}", hash)
}

/// Loads a graph from either input form; returns the graph, a label and
/// the canonical input text used for the content hash.
fn load_graph(input: &GraphInput) -> Result<(Graph, String, String)> {
    if let Some(path) = &input.graph {
        let text = read(path)?;
        let graph = Graph::from_json_str(&text)?;
        Ok((graph, stem(path), text))
    } else {
        let path = input.spec.as_ref().expect("clap enforces one input");
        let text = read(path)?;
        let spec = HierarchySpec::from_json_str(&text)?;
        Ok((build_hierarchy(&spec)?, stem(path), text))
    }
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn build(args: BuildArgs) -> Result<()> {
    let graph = if let Some(path) = &args.spec {
        let spec = HierarchySpec::from_json_str(&read(path)?)?;
        build_hierarchy(&spec)?
    } else {
        // clap guarantees the parameters each kind requires.
        match args.kind.expect("clap enforces --kind or --spec") {
            Kind::Complete => Graph::complete(args.n.unwrap())?,
            Kind::Cycle => Graph::cycle(args.n.unwrap())?,
            Kind::Star => Graph::star(args.n.unwrap())?,
            Kind::Grid => Graph::grid(args.d.unwrap(), args.side.unwrap())?,
            Kind::Porcupine => Graph::porcupine(args.m.unwrap())?,
        }
    };
    let text = if args.dot {
        graph.to_dot("g")
    } else {
        graph.to_json_string()
    };
    emit(text, args.out.as_deref())
}

fn invariants(args: GraphInput) -> Result<()> {
    let (graph, _, text) = load_graph(&args)?;
    let inv = graph.invariants()?;
    let value = json!({
        "diameter": inv.diameter,
        "eccentricity_of_root": inv.eccentricity_of_root,
        "input_hash": content_hash(&text),
        "max_degree": inv.max_degree,
        "max_valency": inv.max_valency,
        "mean_distance": inv.mean_distance,
        "order": graph.order(),
        "total_edge_weight": inv.total_edge_weight,
        "version": env!("CARGO_PKG_VERSION"),
        "weighted_diameter": inv.weighted_diameter,
        "weighted_eccentricity_of_root": inv.weighted_eccentricity_of_root,
    });
    emit(value.to_string(), args.out.as_deref())
}

fn cheeger(args: CheegerArgs) -> Result<()> {
    let (graph, _, text) = load_graph(&args.input)?;
    let (mode, label) = match args.mode {
        Mode::Exact => (CheegerMode::Exact, "exact"),
        Mode::Heuristic => (CheegerMode::Heuristic, "heuristic"),
    };
    let cut = graph.cheeger(mode)?;
    let value = json!({
        "cut": cut.cut,
        "input_hash": content_hash(&text),
        "mode": label,
        "value": cut.value,
        "version": env!("CARGO_PKG_VERSION"),
    });
    emit(value.to_string(), args.input.out.as_deref())
}

fn spectrum(args: SpectrumArgs) -> Result<()> {
    let (spectrum, method, text): (Spectrum, &str, String) = match args.method {
        Method::Recursive => {
            let path = args
                .input
                .spec
                .as_ref()
                .ok_or_else(|| anyhow!("--method recursive requires --spec"))?;
            let text = read(path)?;
            let spec = HierarchySpec::from_json_str(&text)?;
            (recursive_spectrum(&spec)?, "recursive", text)
        }
        Method::Dense => {
            let (graph, _, text) = load_graph(&args.input)?;
            (dense_spectrum(&graph), "dense", text)
        }
    };
    let value = json!({
        "eigenvalues": spectrum.values(),
        "input_hash": content_hash(&text),
        "lambda2": spectrum.lambda2(),
        "method": method,
        "version": env!("CARGO_PKG_VERSION"),
    });
    emit(value.to_string(), args.input.out.as_deref())
}

fn formulas(args: FormulasArgs) -> Result<()> {
    let text = read(&args.spec)?;
    let spec = HierarchySpec::from_json_str(&text)?;
    let first = &spec.bases()[0];
    if spec
        .bases()
        .iter()
        .any(|b| b.edges() != first.edges() || b.order() != first.order())
    {
        bail!("closed forms need equal base graphs at every level");
    }
    let base = BaseInvariants::measure(first)?;
    let record =
        hiertopo::closed_forms::hierarchy_formulas(&base, spec.levels(), spec.alphas())?;
    let mut value = json!({
        "diameter": record.diameter,
        "input_hash": content_hash(&text),
        "levels": spec.levels(),
        "max_degree": record.max_degree,
        "order": spec.order(),
        "root_eccentricity": record.root_eccentricity,
        "total_edge_weight": record.total_edge_weight,
        "version": env!("CARGO_PKG_VERSION"),
        "weighted_diameter": record.weighted_diameter,
        "weighted_root_eccentricity": record.weighted_root_eccentricity,
    });
    let complete = first.edges() == Graph::complete(first.order())?.edges();
    if complete {
        if let Some(alpha) = spec.geometric_alpha() {
            value["regime"] = json!(Regime::classify(first.order(), alpha).label());
        }
    }
    if spec.is_truncated() {
        value["truncated_node_count"] =
            json!(truncated_node_count(first.order(), spec.levels()));
    }
    emit(value.to_string(), args.out.as_deref())
}

fn ghz(args: GhzArgs) -> Result<()> {
    let (prob, label, text, alpha) = if let Some(path) = &args.spec {
        let text = read(path)?;
        let spec = HierarchySpec::from_json_str(&text)?;
        (
            probability_weights(&spec, args.p0, args.alpha)?,
            stem(path),
            text,
            args.alpha,
        )
    } else {
        let path = args.graph.as_ref().expect("clap enforces one input");
        let text = read(path)?;
        let graph = Graph::from_json_str(&text)?;
        (ProbGraph::uniform(&graph, args.p0)?, stem(path), text, 1.0)
    };
    let start = match args.start.as_str() {
        "center" => weighted_center(prob.graph())?,
        other => other
            .parse::<usize>()
            .map_err(|_| anyhow!("--start must be a node index or \"center\""))?,
    };
    let stats = ghz_trials(&prob, start, args.trials, args.seed, args.jobs)?;
    let n = prob.graph().order();
    if args.csv {
        let mut text = String::from(
            "graph,N,alpha,p0,start,trials,mean,std,prediction,bound_lo,bound_hi,seed\n",
        );
        text.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            label,
            n,
            alpha,
            args.p0,
            start,
            stats.trials,
            stats.mean,
            stats.std,
            stats.prediction,
            stats.bound_lo,
            stats.bound_hi,
            stats.seed
        ));
        emit(text, args.out.as_deref())
    } else {
        let value = json!({
            "alpha": alpha,
            "bound_hi": stats.bound_hi,
            "bound_lo": stats.bound_lo,
            "generator": GENERATOR_FAMILY,
            "graph": label,
            "input_hash": content_hash(&text),
            "max": stats.max,
            "mean": stats.mean,
            "min": stats.min,
            "n": n,
            "p0": args.p0,
            "prediction": stats.prediction,
            "seed": stats.seed,
            "start": start,
            "std": stats.std,
            "trials": stats.trials,
            "version": env!("CARGO_PKG_VERSION"),
        });
        emit(value.to_string(), args.out.as_deref())
    }
}

fn place_cmd(args: PlaceArgs) -> Result<()> {
    let machine_text = read(&args.machine)?;
    let machine = HierarchySpec::from_json_str(&machine_text)?;
    let gates_text = read(&args.gates)?;
    let gates = parse_gate_list(&gates_text)?;
    let circuit = circuit_graph(&gates)?;
    let hash = content_hash(&format!("{}\n{}", machine_text, gates_text));

    if args.trials <= 1 {
        let placement = place(&circuit, &machine, args.seed)?;
        let mapping: serde_json::Map<String, Value> = placement
            .mapping
            .iter()
            .enumerate()
            .map(|(q, &node)| (q.to_string(), json!(node)))
            .collect();
        let value = json!({
            "cost": placement.cost,
            "input_hash": hash,
            "machine": machine.to_json(),
            "mapping": mapping,
            "naive_cost": placement.naive_cost,
            "seed": placement.seed,
            "version": env!("CARGO_PKG_VERSION"),
        });
        return emit(value.to_string(), args.out.as_deref());
    }

    let seeds = derive_seeds(args.seed, args.trials);
    let naive_cost = naive_placement(&circuit, &machine)?.cost;
    let workers = args.jobs.max(1).min(args.trials);
    let chunk = args.trials.div_ceil(workers);
    let results: Vec<Result<Vec<(u64, u64)>>> = std::thread::scope(|scope| {
        seeds
            .chunks(chunk)
            .map(|chunk_seeds| {
                let circuit = &circuit;
                let machine = &machine;
                scope.spawn(move || {
                    chunk_seeds
                        .iter()
                        .map(|&s| place(circuit, machine, s).map(|p| (s, p.cost)))
                        .collect::<hiertopo::Result<Vec<_>>>()
                        .map_err(Into::into)
                })
            })
            .collect::<Vec<_>>()
            .into_iter()
            .map(|h| h.join().unwrap())
            .collect()
    });
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    let mean_ratio = if naive_cost == 0 {
        1.0
    } else {
        rows.iter().map(|&(_, c)| c as f64 / naive_cost as f64).sum::<f64>() / rows.len() as f64
    };
    let value = json!({
        "input_hash": hash,
        "machine": machine.to_json(),
        "mean_ratio": mean_ratio,
        "naive_cost": naive_cost,
        "results": rows
            .iter()
            .map(|&(s, c)| json!({"cost": c, "seed": s}))
            .collect::<Vec<_>>(),
        "seed": args.seed,
        "trials": args.trials,
        "version": env!("CARGO_PKG_VERSION"),
    });
    emit(value.to_string(), args.out.as_deref())
}

fn pareto_cmd(args: ParetoArgs) -> Result<()> {
    let text = read(&args.records)?;
    let raw: Value = serde_json::from_str(&text).context("parsing records JSON")?;
    let items = raw
        .as_array()
        .ok_or_else(|| anyhow!("records file must hold a JSON array"))?;
    let mut records = Vec::new();
    for item in items {
        let field = |name: &str| {
            item.get(name)
                .ok_or_else(|| anyhow!("record is missing field `{}`", name))
        };
        records.push(pareto::MetricTuple {
            label: field("label")?
                .as_str()
                .ok_or_else(|| anyhow!("label must be a string"))?
                .to_string(),
            weighted_diameter: field("weighted_diameter")?
                .as_f64()
                .ok_or_else(|| anyhow!("weighted_diameter must be a number"))?,
            max_degree: field("max_degree")?
                .as_u64()
                .ok_or_else(|| anyhow!("max_degree must be an integer"))?,
            total_edge_weight: field("total_edge_weight")?
                .as_f64()
                .ok_or_else(|| anyhow!("total_edge_weight must be a number"))?,
            order: field("n")?
                .as_u64()
                .ok_or_else(|| anyhow!("n must be an integer"))? as usize,
        });
    }
    let front = pareto::pareto_front(&records)?;
    let value = json!({
        "input_hash": content_hash(&text),
        "survivors": front
            .iter()
            .map(|r| {
                json!({
                    "label": r.label,
                    "max_degree": r.max_degree,
                    "n": r.order,
                    "total_edge_weight": r.total_edge_weight,
                    "weighted_diameter": r.weighted_diameter,
                })
            })
            .collect::<Vec<_>>(),
        "version": env!("CARGO_PKG_VERSION"),
    });
    emit(value.to_string(), args.out.as_deref())
}
