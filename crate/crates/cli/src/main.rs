//! `rrim`: seed selection, spread estimation and graph generation.
//!
//! Exit codes: 0 success, 2 bad flags, 3 input/output failure, 4 constraint
//! violation (invalid parameters, LT weights, unknown seed ids).

mod report;

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use rrim::graph::{barabasi_albert_edges, parse_edge_list};
use rrim::oracle::{simulate_union_spread, DEFAULT_TRIALS};
use rrim::sampler::{default_workers, DEFAULT_LANE_WIDTH, DEFAULT_QUEUE_CAPACITY};
use rrim::{
    run_imm, run_mrim, simulate_spread, CsrGraph, EstimationTrace, ImmParams, Model, NodeId,
    WeightScheme, WorkerConfig,
};
use sha2::{Digest, Sha256};

use report::{InputInfo, MrimReport, ParamsEcho, RunReport, SpreadReport, TraceSummary};

#[derive(Parser)]
#[command(
    name = "rrim",
    version,
    about = "Influence maximization with reverse reachable sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Select k seeds maximizing expected spread.
    Run(RunArgs),
    /// Write a Barabasi-Albert graph as an edge list.
    GenGraph(GenArgs),
    /// Monte-Carlo spread of a given seed set.
    Spread(SpreadArgs),
    /// Select k seeds per round over several diffusion rounds.
    Mrim(MrimArgs),
}

#[derive(Args)]
struct GraphArgs {
    /// Edge list ("u v" or "u v p" per line) or binary CSR cache.
    #[arg(long)]
    graph: PathBuf,
    /// Edge probabilities: wc, file, or uniform:P.
    #[arg(long, default_value = "wc")]
    weights: Weights,
    /// Treat every line as two directed edges.
    #[arg(long)]
    undirected: bool,
}

#[derive(Args)]
struct ExecArgs {
    #[arg(long, default_value_t = 1.0)]
    ell: f64,
    #[arg(long, default_value = "ic")]
    model: Model,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sampling workers, or "auto" for four per hardware thread.
    #[arg(long, default_value = "auto")]
    workers: Workers,
    /// Frontier queue capacity per worker.
    #[arg(long, default_value_t = DEFAULT_QUEUE_CAPACITY)]
    queue: usize,
    /// Monte-Carlo trials for an independent spread check (0 to skip).
    #[arg(long, default_value_t = 0)]
    verify_trials: usize,
    /// Emit a JSON report.
    #[arg(long)]
    json: bool,
    /// Include wall-clock phase timings in the JSON report.
    #[arg(long)]
    timings: bool,
    /// Print estimation rounds to stderr.
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    epsilon: f64,
    #[command(flatten)]
    exec: ExecArgs,
}

#[derive(Args)]
struct MrimArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Seeds per round.
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, default_value_t = 5)]
    rounds: u32,
    #[command(flatten)]
    exec: ExecArgs,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    /// Edges added per new node.
    #[arg(long)]
    r: usize,
    /// Size of the initial clique (defaults to r).
    #[arg(long)]
    r0: Option<usize>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SpreadArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Comma-separated seed ids as they appear in the input.
    #[arg(long)]
    seeds: String,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, default_value = "ic")]
    model: Model,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, Debug)]
struct Weights(WeightScheme);

impl FromStr for Weights {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let scheme = match s {
            "wc" => WeightScheme::WeightedCascade,
            "file" => WeightScheme::FromFile,
            _ => {
                let p = s
                    .strip_prefix("uniform:")
                    .ok_or_else(|| format!("expected wc, file or uniform:P, got {s:?}"))?;
                let p: f64 = p.parse().map_err(|_| format!("bad probability {p:?}"))?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(format!("probability {p} outside [0, 1]"));
                }
                WeightScheme::UniformConstant(p)
            }
        };
        Ok(Weights(scheme))
    }
}

impl fmt::Display for Weights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            WeightScheme::WeightedCascade => write!(f, "wc"),
            WeightScheme::FromFile => write!(f, "file"),
            WeightScheme::UniformConstant(p) => write!(f, "uniform:{p}"),
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Workers {
    Auto,
    Fixed(usize),
}

impl Workers {
    fn resolve(self) -> usize {
        match self {
            Workers::Auto => default_workers(),
            Workers::Fixed(w) => w,
        }
    }
}

impl FromStr for Workers {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(Workers::Auto);
        }
        match s.parse::<usize>() {
            Ok(w) if w > 0 => Ok(Workers::Fixed(w)),
            _ => Err(format!(
                "expected a positive integer or \"auto\", got {s:?}"
            )),
        }
    }
}

impl fmt::Display for Workers {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Workers::Auto => write!(f, "auto"),
            Workers::Fixed(w) => write!(f, "{w}"),
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl From<rrim::Error> for Failure {
    fn from(e: rrim::Error) -> Self {
        use rrim::Error::*;
        let code = match e {
            Io { .. }
            | Parse { .. }
            | InvalidProbability { .. }
            | MissingProbability { .. }
            | Cache(_) => 3,
            InvalidParameter(_) | Constraint(_) | OutOfMemory(_) | TooLarge(_) => 4,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::from(rrim::Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn constraint(message: String) -> Failure {
    Failure { code: 4, message }
}

/// Reads the graph, recognizing the binary cache by its magic bytes.
fn load_graph(args: &GraphArgs) -> Result<(CsrGraph, InputInfo), Failure> {
    let bytes = std::fs::read(&args.graph).map_err(|e| io_failure(&args.graph, e))?;
    let graph = if bytes.starts_with(b"GCSR") {
        CsrGraph::read_binary(&bytes[..])?
    } else {
        parse_edge_list(&bytes[..], args.weights.0, !args.undirected).map_err(|e| match e {
            rrim::Error::Io { source, .. } => io_failure(&args.graph, source),
            e => e.into(),
        })?
    };
    let info = InputInfo {
        path: args.graph.display().to_string(),
        sha256: hex::encode(Sha256::digest(&bytes)),
        n: graph.n(),
        m: graph.m(),
        weights: args.weights.to_string(),
        undirected: args.undirected,
    };
    Ok((graph, info))
}

fn worker_config(exec: &ExecArgs) -> WorkerConfig {
    WorkerConfig {
        workers: exec.workers.resolve(),
        lane_width: DEFAULT_LANE_WIDTH,
        queue_capacity: exec.queue,
        seed: exec.seed,
    }
}

fn params_echo(k: usize, epsilon: f64, rounds: Option<u32>, exec: &ExecArgs) -> ParamsEcho {
    ParamsEcho {
        k,
        epsilon,
        ell: exec.ell,
        model: exec.model,
        rounds,
        seed: exec.seed,
        workers: exec.workers.to_string(),
        queue: exec.queue,
        verify_trials: exec.verify_trials,
    }
}

fn print_trace(trace: &EstimationTrace) {
    for r in &trace.rounds {
        eprintln!("{r}");
    }
    eprintln!("lower_bound={} theta={}", trace.lower_bound, trace.theta);
}

/// Seed for the verification simulation, kept apart from the sampling streams.
fn verify_seed(seed: u64) -> u64 {
    seed ^ 0x5eed_0f75_7e57
}

fn write_json<T: serde::Serialize>(value: &T) -> Result<(), Failure> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    serde_json::to_writer_pretty(&mut out, value)
        .map_err(|e| io_failure(Path::new("<stdout>"), e.into()))?;
    writeln!(out).map_err(|e| io_failure(Path::new("<stdout>"), e))
}

fn seed_list(ids: &[u64]) -> String {
    ids.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
}

fn cmd_run(args: RunArgs) -> Result<(), Failure> {
    let (graph, input) = load_graph(&args.graph)?;
    let exec = &args.exec;
    let params = ImmParams {
        k: args.k,
        epsilon: args.epsilon,
        ell: exec.ell,
        model: exec.model,
        workers: worker_config(exec),
    };
    let outcome = run_imm(&graph, &params)?;
    if exec.verbose {
        print_trace(&outcome.trace);
    }
    let verification = if exec.verify_trials > 0 {
        Some(simulate_spread(
            &graph,
            &outcome.result.seeds,
            exec.model,
            exec.verify_trials,
            verify_seed(exec.seed),
        )?)
    } else {
        None
    };
    let report = RunReport {
        command: "run",
        input,
        params: params_echo(args.k, args.epsilon, None, exec),
        theta: outcome.result.theta,
        estimation: TraceSummary::from(&outcome.trace),
        seeds: outcome.result.original_seeds.clone(),
        marginal_coverage: outcome.result.marginal_coverage.clone(),
        spread_estimate: outcome.result.spread_estimate,
        verification,
        timings: exec.timings.then_some(outcome.timings),
    };
    if exec.json {
        return write_json(&report);
    }
    println!(
        "graph: {} (n={}, m={})",
        report.input.path, report.input.n, report.input.m
    );
    println!("theta: {}", report.theta);
    println!("lower bound: {:.4}", report.estimation.lower_bound);
    println!("seeds: {}", seed_list(&report.seeds));
    println!("spread estimate: {:.4}", report.spread_estimate);
    if let Some(v) = report.verification {
        println!(
            "monte-carlo spread: {:.4} ± {:.4} ({} trials)",
            v.mean, v.std_error, v.trials
        );
    }
    let t = outcome.timings;
    println!(
        "time: sampling {:.3}s, selection {:.3}s, total {:.3}s",
        t.sampling_secs, t.selection_secs, t.total_secs
    );
    Ok(())
}

fn cmd_mrim(args: MrimArgs) -> Result<(), Failure> {
    let (graph, input) = load_graph(&args.graph)?;
    let exec = &args.exec;
    let params = ImmParams {
        k: args.k,
        epsilon: args.epsilon,
        ell: exec.ell,
        model: exec.model,
        workers: worker_config(exec),
    };
    let outcome = run_mrim(&graph, &params, args.rounds)?;
    if exec.verbose {
        print_trace(&outcome.trace);
    }
    let verification = if exec.verify_trials > 0 {
        Some(simulate_union_spread(
            &graph,
            &outcome.result.per_round,
            exec.model,
            exec.verify_trials,
            verify_seed(exec.seed),
        )?)
    } else {
        None
    };
    let report = MrimReport {
        command: "mrim",
        input,
        params: params_echo(args.k, args.epsilon, Some(args.rounds), exec),
        theta: outcome.result.theta,
        estimation: TraceSummary::from(&outcome.trace),
        seeds_per_round: outcome.result.original_per_round.clone(),
        spread_estimate: outcome.result.spread_estimate,
        verification,
        timings: exec.timings.then_some(outcome.timings),
    };
    if exec.json {
        return write_json(&report);
    }
    println!(
        "graph: {} (n={}, m={})",
        report.input.path, report.input.n, report.input.m
    );
    println!("theta: {}", report.theta);
    for (t, seeds) in report.seeds_per_round.iter().enumerate() {
        println!("round {t}: {}", seed_list(seeds));
    }
    println!(
        "spread estimate (at least once): {:.4}",
        report.spread_estimate
    );
    if let Some(v) = report.verification {
        println!(
            "monte-carlo spread: {:.4} ± {:.4} ({} trials)",
            v.mean, v.std_error, v.trials
        );
    }
    let t = outcome.timings;
    println!(
        "time: sampling {:.3}s, selection {:.3}s, total {:.3}s",
        t.sampling_secs, t.selection_secs, t.total_secs
    );
    Ok(())
}

fn cmd_gen_graph(args: GenArgs) -> Result<(), Failure> {
    let r0 = args.r0.unwrap_or(args.r);
    let edges = barabasi_albert_edges(args.n, args.r, r0, args.seed)?;
    let file = File::create(&args.out).map_err(|e| io_failure(&args.out, e))?;
    let mut out = BufWriter::new(file);
    // both directions, so the default directed load yields the symmetric graph
    for &(a, b) in &edges {
        writeln!(out, "{a} {b}\n{b} {a}").map_err(|e| io_failure(&args.out, e))?;
    }
    out.flush().map_err(|e| io_failure(&args.out, e))?;
    println!("n={} m={}", args.n, edges.len());
    Ok(())
}

fn cmd_spread(args: SpreadArgs) -> Result<(), Failure> {
    let (graph, input) = load_graph(&args.graph)?;
    let mut seeds: Vec<NodeId> = Vec::new();
    for token in args
        .seeds
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
    {
        let id: u64 = token
            .parse()
            .map_err(|_| constraint(format!("seed {token:?} is not a node id")))?;
        let v = graph
            .dense_id(id)
            .ok_or_else(|| constraint(format!("seed {id} not in graph")))?;
        seeds.push(v);
    }
    if seeds.is_empty() {
        return Err(constraint("no seeds given".into()));
    }
    let est = simulate_spread(&graph, &seeds, args.model, args.trials, args.seed)?;
    if args.json {
        return write_json(&SpreadReport {
            command: "spread",
            input,
            model: args.model,
            seeds: seeds.iter().map(|&v| graph.original_id(v)).collect(),
            seed: args.seed,
            estimate: est,
        });
    }
    println!("{:.6} ± {:.6}", est.mean, est.std_error);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::GenGraph(a) => cmd_gen_graph(a),
        Command::Spread(a) => cmd_spread(a),
        Command::Mrim(a) => cmd_mrim(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
