use anyhow::{bail, Context as _, Result};
use clap::{Parser, Subcommand, ValueEnum};
use ftsparse::experiment::{run_experiment, size_trend_config, ExperimentConfig, InstanceSpec, Outcome};
use ftsparse::ftrs::{build_anchored_ftrs_with, build_pairwise_ftrs_greedy_with, build_pairwise_ftrs_minimal_with};
use ftsparse::io::{format_graph, format_pairs, format_subgraph, read_graph, read_pairs, read_subgraph};
use ftsparse::lowerbound::layered_counts;
use ftsparse::scc::{build_kft_scc_with, retries_of, Constants, KftOptions};
use ftsparse::verify::{verify_connectivity_certificate, verify_ftrs, verify_scc_preserver, ConnectivityMode};
use ftsparse::{BuildOptions, Direction, Error, PairSet, Preserver, VerificationReport, VerifyOptions};
use serde_json::json;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_FAIL: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "ftsparse", version, about = "Fault-tolerant reachability and SCC preservers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance: graph, pairs and a provenance JSON.
    Gen(GenArgs),
    /// Build a fault-tolerant reachability preserver.
    BuildFtrs(BuildFtrsArgs),
    /// Build a fault-tolerant SCC preserver.
    BuildScc(BuildSccArgs),
    /// Exhaustively verify a subgraph (exit 0 pass, 1 fail, 2 over budget).
    Verify(VerifyArgs),
    /// Run an experiment config and write CSV and JSON reports.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Random,
    AppendixA,
    DualFailure,
}

#[derive(clap::Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output prefix; writes PREFIX.graph, PREFIX.pairs and PREFIX.json.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, default_value_t = 30)]
    m: usize,
    #[arg(long)]
    strongly_connected: bool,
    /// Number of random pairs.
    #[arg(long, default_value_t = 0)]
    pairs: usize,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    n_y: usize,
    /// Base pairs.
    #[arg(long, default_value_t = 1)]
    p: usize,
    /// Base path length.
    #[arg(long = "L", default_value_t = 1)]
    l: usize,
    /// Number of layers.
    #[arg(long = "K", conflicts_with = "r")]
    layers: Option<usize>,
    /// Sets the number of layers to L^r.
    #[arg(long)]
    r: Option<u32>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FtrsMethod {
    Anchored,
    Minimal,
    Greedy,
}

#[derive(Clone, Copy, ValueEnum)]
enum Dir {
    Out,
    In,
}

impl From<Dir> for Direction {
    fn from(d: Dir) -> Self {
        match d {
            Dir::Out => Direction::Out,
            Dir::In => Direction::In,
        }
    }
}

#[derive(clap::Args)]
struct BuildFtrsArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    pairs: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, value_enum, default_value = "anchored")]
    method: FtrsMethod,
    #[arg(long, default_value_t = 0)]
    anchor: usize,
    #[arg(long, value_enum, default_value = "out")]
    direction: Dir,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    no_verify: bool,
    #[arg(long, env = ftsparse::verify::CAP_ENV_VAR)]
    cap: Option<u64>,
}

#[derive(clap::Args)]
struct BuildSccArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "cL")]
    c_l: Option<f64>,
    #[arg(long = "cp")]
    c_p: Option<f64>,
    #[arg(long = "cq")]
    c_q: Option<f64>,
    /// Use the large analysis constants instead of the desk ones.
    #[arg(long)]
    analysis_constants: bool,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 8)]
    max_retries: usize,
    #[arg(long)]
    no_verify: bool,
    #[arg(long, env = ftsparse::verify::CAP_ENV_VAR)]
    cap: Option<u64>,
    /// Subgraph output; provenance goes to OUT.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Ftrs,
    Scc,
    Cert,
}

#[derive(Clone, Copy, ValueEnum)]
enum Conn {
    Edge,
    Vertex,
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    sub: PathBuf,
    #[arg(long)]
    pairs: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, value_enum, default_value = "scc")]
    mode: Mode,
    /// Connectivity notion for `--mode cert`.
    #[arg(long, value_enum, default_value = "edge")]
    conn: Conn,
    #[arg(long, env = ftsparse::verify::CAP_ENV_VAR)]
    cap: Option<u64>,
}

#[derive(clap::Args)]
struct BenchArgs {
    #[arg(long, required_unless_present = "preset")]
    config: Option<PathBuf>,
    #[arg(long, value_parser = ["size-trend"])]
    preset: Option<String>,
    /// Replaces the seed list of every sweep.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Output prefix; writes OUT.csv and OUT.json.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    verify: bool,
    #[arg(long, env = ftsparse::verify::CAP_ENV_VAR)]
    cap: Option<u64>,
}

fn verify_options(cap: Option<u64>) -> VerifyOptions {
    cap.map_or_else(VerifyOptions::default, VerifyOptions::with_cap)
}

fn with_ext(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_pairs(path: Option<&Path>, n: usize) -> Result<PairSet> {
    match path {
        Some(p) => read_pairs(p, n).with_context(|| format!("reading {}", p.display())),
        None => Ok(PairSet::default()),
    }
}

fn gen(args: GenArgs) -> Result<ExitCode> {
    let spec = match args.family {
        Family::Random => InstanceSpec::Random {
            n: args.n,
            m: args.m,
            strongly_connected: args.strongly_connected,
            pairs: args.pairs,
        },
        Family::AppendixA => InstanceSpec::AppendixA {
            k: args.k,
            n_y: args.n_y,
        },
        Family::DualFailure => {
            let layers = match (args.layers, args.r) {
                (Some(k), _) => k,
                (None, Some(r)) => args.l.pow(r),
                (None, None) => args.l,
            };
            InstanceSpec::DualFailure {
                p: args.p,
                l: args.l,
                layers,
            }
        }
    };
    let (g, pairs) = spec.realize(args.seed)?;
    let mut provenance = json!({
        "instance": spec,
        "description": spec.describe(),
        "seed": args.seed,
        "n": g.n(),
        "m": g.m(),
        "pairs": pairs.len(),
    });
    if let InstanceSpec::DualFailure { p, l, layers } = spec {
        let (nv, ne) = layered_counts(p * (l + 1), p * l, p, layers);
        provenance["expected_counts"] = json!({ "vertices": nv, "edges": ne });
    }
    write(&with_ext(&args.out, "graph"), &format_graph(&g))?;
    write(&with_ext(&args.out, "pairs"), &format_pairs(&pairs))?;
    write(&with_ext(&args.out, "json"), &serde_json::to_string_pretty(&provenance)?)?;
    println!("{}", serde_json::to_string(&provenance)?);
    Ok(ExitCode::SUCCESS)
}

fn summary(p: &Preserver<'_>) -> serde_json::Value {
    json!({
        "edges": p.edge_count(),
        "provenance": p.provenance,
        "certification": p.certification,
    })
}

fn build_ftrs(args: BuildFtrsArgs) -> Result<ExitCode> {
    let g = read_graph(&args.graph).with_context(|| format!("reading {}", args.graph.display()))?;
    let opts = BuildOptions {
        certify: !args.no_verify,
        verify: verify_options(args.cap),
    };
    let p = match args.method {
        FtrsMethod::Anchored => build_anchored_ftrs_with(&g, args.anchor, args.direction.into(), args.k, &opts)?.edges,
        method => {
            if args.k != 1 {
                bail!("pairwise builders tolerate exactly one failure (got --k {})", args.k);
            }
            let pairs = load_pairs(args.pairs.as_deref(), g.n())?;
            match method {
                FtrsMethod::Minimal => build_pairwise_ftrs_minimal_with(&g, &pairs, &opts)?,
                _ => build_pairwise_ftrs_greedy_with(&g, &pairs, &opts)?,
            }
        }
    };
    write(&args.out, &format_subgraph(&p.subgraph))?;
    write(&with_ext(&args.out, "json"), &serde_json::to_string_pretty(&summary(&p))?)?;
    println!("{}", serde_json::to_string(&summary(&p))?);
    Ok(ExitCode::SUCCESS)
}

fn build_scc(args: BuildSccArgs) -> Result<ExitCode> {
    let g = read_graph(&args.graph).with_context(|| format!("reading {}", args.graph.display()))?;
    let base = if args.analysis_constants { Constants::ANALYSIS } else { Constants::DESK };
    let opts = KftOptions {
        constants: Constants {
            c_l: args.c_l.unwrap_or(base.c_l),
            c_p: args.c_p.unwrap_or(base.c_p),
            c_q: args.c_q.unwrap_or(base.c_q),
        },
        alpha: args.alpha,
        max_retries: args.max_retries,
        build: BuildOptions {
            certify: !args.no_verify,
            verify: verify_options(args.cap),
        },
    };
    let p = build_kft_scc_with(&g, args.k, args.seed, &opts)?;
    let mut report = summary(&p);
    report["retries"] = json!(retries_of(&p));
    report["seed"] = json!(args.seed);
    write(&args.out, &format_subgraph(&p.subgraph))?;
    write(&with_ext(&args.out, "json"), &serde_json::to_string_pretty(&report)?)?;
    println!("{}", json!({ "edges": p.edge_count(), "retries": retries_of(&p), "certification": p.certification }));
    Ok(ExitCode::SUCCESS)
}

fn verify(args: VerifyArgs) -> Result<ExitCode> {
    let g = read_graph(&args.graph).with_context(|| format!("reading {}", args.graph.display()))?;
    let h = read_subgraph(&args.sub, &g).with_context(|| format!("reading {}", args.sub.display()))?;
    let opts = verify_options(args.cap);
    let outcome: ftsparse::Result<VerificationReport> = match args.mode {
        Mode::Ftrs => {
            let pairs = load_pairs(args.pairs.as_deref(), g.n())?;
            verify_ftrs(&g, &h, &pairs, args.k, &opts)
        }
        Mode::Scc => verify_scc_preserver(&g, &h, args.k, &opts),
        Mode::Cert => {
            let mode = match args.conn {
                Conn::Edge => ConnectivityMode::Edge,
                Conn::Vertex => ConnectivityMode::Vertex,
            };
            verify_connectivity_certificate(&g, &h, args.k, mode)
        }
    };
    match outcome {
        Ok(report) => {
            println!("{}", serde_json::to_string(&json!({ "status": if report.passed() { "pass" } else { "fail" }, "report": report }))?);
            Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(EXIT_FAIL) })
        }
        Err(err) => match err.root() {
            Error::BudgetExceeded { needed, cap } => {
                println!("{}", json!({ "status": "budget_exceeded", "needed": needed.to_string(), "cap": cap }));
                Ok(ExitCode::from(EXIT_BUDGET))
            }
            _ => Err(err.into()),
        },
    }
}

fn bench(args: BenchArgs) -> Result<ExitCode> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            ExperimentConfig::from_json(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => size_trend_config(),
    };
    if let Some(seed) = args.seed {
        for sweep in &mut cfg.sweeps {
            sweep.seeds = vec![seed];
        }
    }
    if let Some(graph) = &args.graph {
        for sweep in &mut cfg.sweeps {
            sweep.instances = vec![InstanceSpec::File {
                graph: graph.clone(),
                pairs: None,
            }];
        }
    }
    if let Some(out) = &args.out {
        cfg.csv = Some(with_ext(out, "csv"));
        cfg.json = Some(with_ext(out, "json"));
    }
    if args.verify {
        cfg.verify = true;
    }
    if args.cap.is_some() {
        cfg.cap = args.cap;
    }
    let records = run_experiment(&cfg)?;
    println!(
        "{:<34} {:<17} {:>5} {:>6} {:>3} {:>7} {:>11} {:>10} {:>15}",
        "instance", "method", "n", "m", "k", "edges", "reference", "build_ms", "outcome"
    );
    for r in &records {
        println!(
            "{:<34} {:<17} {:>5} {:>6} {:>3} {:>7} {:>11.0} {:>10.2} {:>15}",
            r.instance,
            r.method,
            r.n,
            r.m,
            r.k,
            r.edges,
            r.reference,
            r.build_ms,
            format!("{:?}", r.outcome)
        );
    }
    if records.iter().any(|r| r.outcome == Outcome::Failed) {
        eprintln!("verification failed for at least one record");
        return Ok(ExitCode::from(EXIT_FAIL));
    }
    if records.iter().any(|r| r.outcome == Outcome::BudgetExceeded) {
        return Ok(ExitCode::from(EXIT_BUDGET));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::BuildFtrs(a) => build_ftrs(a),
        Command::BuildScc(a) => build_scc(a),
        Command::Verify(a) => verify(a),
        Command::Bench(a) => bench(a),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
