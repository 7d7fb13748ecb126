//! Command definitions and their implementations.

use std::collections::HashMap;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand};
use eml_core::decomposition::{h_indices, CorenessTable};
use eml_core::eml::run_eml_detailed;
use eml_core::features::{feature_matrix, FeatureWeights};
use eml_core::metrics::{kendall_tau, EvalReport};
use eml_core::sir::{estimate_vitality, ground_truth_from_estimates};
use eml_core::{Graph, Ranking};
use serde_json::{json, Value};

use crate::params::{Params, Resolved};
use crate::table::{Cell, Document, Format, Parsed};

/// Methods compared by `sweep` and timed by `bench` unless `--methods` is
/// given.
pub const DEFAULT_METHODS: &str = "eml,degree,ks,hindex,lh,localrank,cnc,eks-sum,ls,ds";

#[derive(Parser, Debug)]
#[command(name = "eml", version, about = "Vital-node ranking with extended machine learning and classic centralities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Rank every node by a method's score.
    ///
    /// Output columns: rank,node_label,score (rank is 1-based; ties are
    /// ordered by first appearance in the edge list).
    Rank(RankArgs),
    /// Simulate SIR from every node and report its mean influence.
    ///
    /// Output columns: node_label,mean_influence,std_error,runs.
    GroundTruth(GraphArgs),
    /// Score a ranking against a ground-truth file.
    ///
    /// Output columns: method,kendall_tau,monotonicity,runtime_seconds,
    /// then jaccard@k per requested k. An undefined tau is an empty field.
    Evaluate(EvaluateArgs),
    /// Kendall tau of each method against fresh ground truth per beta.
    ///
    /// Output columns: beta,method,tau.
    Sweep(SweepArgs),
    /// Wall-clock time of each method, excluding graph parsing.
    ///
    /// Output columns: method,seconds.
    Bench(BenchArgs),
    /// Graph size, degree moments and epidemic threshold.
    ///
    /// Output columns: n,m,max_deg,avg_deg,mean_deg_sq,beta_th.
    Stats(GraphArgs),
    /// Per-node degree, shell index, h-index and extended coreness.
    ///
    /// Output columns: node_label,degree,ks,h_index,eks.
    Coreness(GraphArgs),
    /// Nonzero entries of every node's feature vector.
    ///
    /// Output columns: node,neighbour,value.
    Features(GraphArgs),
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Output file [default: standard output]
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// csv or json
    #[arg(long, default_value = "csv")]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct GraphArgs {
    /// Edge list: two node labels per line, separated by whitespace or a
    /// comma; lines starting with `%` or `#` are ignored
    #[arg(long, short)]
    pub input: PathBuf,
    /// JSON file with any of the parameter flags as keys; flags override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub params: Params,
}

#[derive(Args, Debug, Clone)]
pub struct RankArgs {
    /// eml, degree, ks, hindex, lh, localrank, cnc, eks-sum, ls or ds
    #[arg(long, default_value = "eml")]
    pub method: String,
    #[command(flatten)]
    pub graph: GraphArgs,
}

#[derive(Args, Debug, Clone)]
pub struct EvaluateArgs {
    /// Ranking file (from `rank`) or any file with node_label and score or
    /// mean_influence columns
    #[arg(long)]
    pub ranking: PathBuf,
    /// Ground-truth file (from `ground-truth`) or a ranking file
    #[arg(long)]
    pub truth: PathBuf,
    /// Top-k sizes for the Jaccard index [default: 10,50,100 where ≤ n]
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
    /// Width of the rank-histogram bins, in dense ranks
    #[arg(long, default_value_t = 10)]
    pub bin_width: usize,
    /// Also write the rank histogram (columns: bin_start,count) here
    #[arg(long)]
    pub histogram: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    /// Infection probabilities to sweep
    #[arg(long, value_delimiter = ',', conflicts_with = "beta_factors")]
    pub betas: Vec<f64>,
    /// Infection probabilities as multiples of the epidemic threshold
    #[arg(long, value_delimiter = ',')]
    pub beta_factors: Vec<f64>,
    /// Comma-separated methods
    #[arg(long, value_delimiter = ',', default_value = DEFAULT_METHODS)]
    pub methods: Vec<String>,
    #[command(flatten)]
    pub graph: GraphArgs,
}

#[derive(Args, Debug, Clone)]
pub struct BenchArgs {
    /// Comma-separated methods; repeats are timed again
    #[arg(long, value_delimiter = ',', default_value = DEFAULT_METHODS)]
    pub methods: Vec<String>,
    #[command(flatten)]
    pub graph: GraphArgs,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Rank(a) => emit(&a.graph.output, rank(&a)?),
        Command::GroundTruth(a) => emit(&a.output, ground_truth(&a)?),
        Command::Evaluate(a) => evaluate(&a),
        Command::Sweep(a) => emit(&a.graph.output, sweep(&a)?),
        Command::Bench(a) => emit(&a.graph.output, bench(&a)?),
        Command::Stats(a) => emit(&a.output, stats(&a)?),
        Command::Coreness(a) => emit(&a.output, coreness(&a)?),
        Command::Features(a) => emit(&a.output, features(&a)?),
    }
}

fn emit(out: &OutputArgs, doc: Document) -> Result<()> {
    doc.write(out.output.as_deref(), out.format)
}

pub fn load_graph(path: &Path) -> Result<Graph> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Graph::parse_edge_list(BufReader::new(file)).with_context(|| format!("reading edge list {}", path.display()))
}

/// Graph plus fully resolved parameters for a command.
struct Setup {
    graph: Graph,
    params: Resolved,
}

impl Setup {
    fn new(args: &GraphArgs) -> Result<Self> {
        let graph = load_graph(&args.input)?;
        let params = args.params.clone().load(args.config.as_deref())?.resolve(&graph)?;
        Ok(Setup { graph, params })
    }

    fn meta(&self, command: &str, input: &Path, extra: Value) -> Value {
        let mut meta = json!({
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "input": input.display().to_string(),
            "nodes": self.graph.node_count(),
            "edges": self.graph.edge_count(),
            "params": self.params,
        });
        if let (Value::Object(m), Value::Object(e)) = (&mut meta, extra) {
            m.extend(e);
        }
        meta
    }
}

/// Scores from one method, plus method-specific diagnostics.
fn score(g: &Graph, params: &Resolved, method: &str) -> Result<(Ranking, Value)> {
    if method == "eml" {
        let out = run_eml_detailed(g, &params.eml()?)?;
        let info = json!({
            "sample_size": out.sample.len(),
            "k": out.k,
            "k_candidates": out.k_candidates,
            "svr_epsilon": out.epsilon,
            "svr_sigma": out.sigma,
        });
        return Ok((out.ranking, info));
    }
    let ranking = params.baseline(method)?.rank(g)?;
    Ok((ranking, json!({})))
}

fn ranking_document(g: &Graph, ranking: &Ranking, meta: Value) -> Document {
    let mut doc = Document::new(meta, &["rank", "node_label", "score"]);
    for (i, &u) in ranking.order.iter().enumerate() {
        doc.push(vec![(i + 1).into(), g.label(u).into(), ranking.scores[u].into()]);
    }
    doc
}

pub fn rank(args: &RankArgs) -> Result<Document> {
    let setup = Setup::new(&args.graph)?;
    let start = Instant::now();
    let (ranking, info) = score(&setup.graph, &setup.params, &args.method)?;
    let seconds = start.elapsed().as_secs_f64();
    let mut extra = json!({ "method": args.method, "seconds": seconds });
    extra.as_object_mut().unwrap().extend(info.as_object().cloned().unwrap_or_default());
    let meta = setup.meta("rank", &args.graph.input, extra);
    Ok(ranking_document(&setup.graph, &ranking, meta))
}

pub fn ground_truth(args: &GraphArgs) -> Result<Document> {
    let setup = Setup::new(args)?;
    let nodes: Vec<usize> = (0..setup.graph.node_count()).collect();
    let start = Instant::now();
    let estimates = estimate_vitality(&setup.graph, &nodes, &setup.params.sir()?)?;
    let seconds = start.elapsed().as_secs_f64();
    let meta = setup.meta("ground-truth", &args.input, json!({ "method": "ground-truth", "seconds": seconds }));
    let mut doc = Document::new(meta, &["node_label", "mean_influence", "std_error", "runs"]);
    for e in &estimates {
        doc.push(vec![
            setup.graph.label(e.node).into(),
            e.mean_influence.into(),
            e.std_error.into(),
            e.runs.into(),
        ]);
    }
    Ok(doc)
}

/// Labels and per-label scores from a ranking or vitality file.
struct ScoreFile {
    method: String,
    labels: Vec<String>,
    scores: Vec<f64>,
    seconds: Option<f64>,
}

impl ScoreFile {
    fn read(path: &Path) -> Result<Self> {
        let parsed = Parsed::read(path)?;
        let column = ["score", "mean_influence"]
            .into_iter()
            .find(|c| parsed.column(c).is_some())
            .with_context(|| format!("{} has neither a score nor a mean_influence column", path.display()))?;
        let labels = parsed.texts("node_label")?;
        let scores = parsed
            .floats(column)?
            .into_iter()
            .zip(&labels)
            .map(|(s, l)| s.with_context(|| format!("{}: node {l} has no score", path.display())))
            .collect::<Result<Vec<_>>>()?;
        let method = parsed.meta["method"]
            .as_str()
            .map(str::to_string)
            .or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()))
            .unwrap_or_default();
        Ok(ScoreFile {
            method,
            labels,
            scores,
            seconds: parsed.meta["seconds"].as_f64(),
        })
    }
}

pub fn evaluate_report(args: &EvaluateArgs) -> Result<EvalReport> {
    let truth = ScoreFile::read(&args.truth)?;
    let ranked = ScoreFile::read(&args.ranking)?;
    let n = truth.labels.len();
    let index: HashMap<&str, usize> = truth.labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    ensure!(index.len() == n, "duplicate labels in {}", args.truth.display());
    ensure!(
        ranked.labels.len() == n,
        "ranking covers {} nodes but the ground truth covers {n}",
        ranked.labels.len()
    );
    let mut scores = vec![f64::NAN; n];
    for (label, &s) in ranked.labels.iter().zip(&ranked.scores) {
        let &i = index
            .get(label.as_str())
            .with_context(|| format!("node {label} is missing from the ground truth"))?;
        ensure!(scores[i].is_nan(), "node {label} appears twice in the ranking");
        scores[i] = s;
    }
    let r = Ranking::from_scores(ranked.method, scores);
    let gtr = Ranking::from_scores(truth.method, truth.scores);
    let ks: Vec<usize> = if args.k.is_empty() {
        [10, 50, 100].into_iter().filter(|&k| k <= n).collect()
    } else {
        args.k.clone()
    };
    Ok(EvalReport::evaluate(&r, &gtr, &ks, args.bin_width, ranked.seconds.unwrap_or(f64::NAN))?)
}

pub fn evaluate(args: &EvaluateArgs) -> Result<()> {
    let report = evaluate_report(args)?;
    let meta = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "command": "evaluate",
        "ranking": args.ranking.display().to_string(),
        "truth": args.truth.display().to_string(),
        "bin_width": args.bin_width,
    });
    let mut columns = vec!["method".to_string(), "kendall_tau".into(), "monotonicity".into(), "runtime_seconds".into()];
    columns.extend(report.jaccard_at.keys().map(|k| format!("jaccard@{k}")));
    let columns: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut doc = Document::new(meta.clone(), &columns);
    let runtime = if report.runtime_seconds.is_nan() {
        Cell::Missing
    } else {
        report.runtime_seconds.into()
    };
    let mut row = vec![
        report.method.as_str().into(),
        report.kendall_tau.into(),
        report.monotonicity.into(),
        runtime,
    ];
    row.extend(report.jaccard_at.values().map(|&j| Cell::from(j)));
    doc.push(row);
    if let Some(path) = &args.histogram {
        let mut hist = Document::new(meta, &["bin_start", "count"]);
        for b in &report.rank_histogram {
            hist.push(vec![b.bin_start.into(), b.count.into()]);
        }
        hist.write(Some(path), args.output.format)?;
    }
    emit(&args.output, doc)
}

pub fn sweep(args: &SweepArgs) -> Result<Document> {
    let setup = Setup::new(&args.graph)?;
    let betas: Vec<f64> = if !args.betas.is_empty() {
        args.betas.clone()
    } else if !args.beta_factors.is_empty() {
        let th = setup
            .graph
            .stats()?
            .beta_threshold
            .context("graph has no positive epidemic threshold; use --betas")?;
        args.beta_factors.iter().map(|f| f * th).collect()
    } else {
        bail!("give --betas or --beta-factors");
    };
    let meta = setup.meta(
        "sweep",
        &args.graph.input,
        json!({ "betas": betas, "methods": args.methods }),
    );
    let mut doc = Document::new(meta, &["beta", "method", "tau"]);
    for &beta in &betas {
        let params = Resolved {
            beta: Some(beta),
            ..setup.params.clone()
        };
        let nodes: Vec<usize> = (0..setup.graph.node_count()).collect();
        let truth = ground_truth_from_estimates(
            setup.graph.node_count(),
            &estimate_vitality(&setup.graph, &nodes, &params.sir()?)?,
        );
        for method in &args.methods {
            let (ranking, _) = score(&setup.graph, &params, method)?;
            let tau = kendall_tau(&ranking.scores, &truth.scores)?;
            doc.push(vec![beta.into(), method.as_str().into(), tau.into()]);
        }
    }
    Ok(doc)
}

pub fn bench(args: &BenchArgs) -> Result<Document> {
    let setup = Setup::new(&args.graph)?;
    let meta = setup.meta("bench", &args.graph.input, json!({ "methods": args.methods }));
    let mut doc = Document::new(meta, &["method", "seconds"]);
    for method in &args.methods {
        let start = Instant::now();
        score(&setup.graph, &setup.params, method)?;
        doc.push(vec![method.as_str().into(), start.elapsed().as_secs_f64().into()]);
    }
    Ok(doc)
}

pub fn stats(args: &GraphArgs) -> Result<Document> {
    let setup = Setup::new(args)?;
    let s = setup.graph.stats()?;
    let mut doc = Document::new(
        setup.meta("stats", &args.input, json!({})),
        &["n", "m", "max_deg", "avg_deg", "mean_deg_sq", "beta_th"],
    );
    doc.push(vec![
        s.n.into(),
        s.m.into(),
        s.max_degree.into(),
        s.avg_degree.into(),
        s.mean_degree_squared.into(),
        s.beta_threshold.into(),
    ]);
    Ok(doc)
}

pub fn coreness(args: &GraphArgs) -> Result<Document> {
    let setup = Setup::new(args)?;
    let g = &setup.graph;
    let table = CorenessTable::compute(g);
    let h = h_indices(g);
    let mut doc = Document::new(
        setup.meta("coreness", &args.input, json!({})),
        &["node_label", "degree", "ks", "h_index", "eks"],
    );
    for u in 0..g.node_count() {
        doc.push(vec![
            g.label(u).into(),
            g.degree(u).into(),
            table.ks[u].into(),
            h[u].into(),
            table.eks[u].into(),
        ]);
    }
    Ok(doc)
}

pub fn features(args: &GraphArgs) -> Result<Document> {
    let setup = Setup::new(args)?;
    let g = &setup.graph;
    let weights = FeatureWeights {
        alpha1: setup.params.alpha1,
        alpha2: setup.params.alpha2,
    };
    let rows = feature_matrix(g, weights, &CorenessTable::compute(g))?;
    let mut doc = Document::new(
        setup.meta("features", &args.input, json!({})),
        &["node", "neighbour", "value"],
    );
    for (u, row) in rows.iter().enumerate() {
        for &(v, x) in &row.entries {
            doc.push(vec![g.label(u).into(), g.label(v).into(), x.into()]);
        }
    }
    Ok(doc)
}
