//! Experiment configs, size-vs-reference records and report files.

use crate::error::{Error, Result};
use crate::ftrs::{
    anchored_pairs, build_anchored_ftrs_with, build_pairwise_ftrs_greedy_with, build_pairwise_ftrs_minimal_with,
};
use crate::graph::{DiGraph, PairSet, Subgraph, Vertex};
use crate::io::{read_graph, read_pairs};
use crate::lowerbound::{gen_appendix_a, gen_base_disjoint_paths, gen_dual_failure_graph};
use crate::preserver::BuildOptions;
use crate::random::{gen_random_digraph, random_pairs};
use crate::reach::Direction;
use crate::scc::{build_1ft_scc_with, build_h0, build_kft_scc_with, check_prefix_property, retries_of, Constants, KftOptions, OrderedList};
use crate::verify::{verify_ftrs, verify_scc_preserver, VerificationReport, VerifyOptions};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum InstanceSpec {
    Random {
        n: usize,
        m: usize,
        #[serde(default)]
        strongly_connected: bool,
        #[serde(default)]
        pairs: usize,
    },
    AppendixA {
        k: usize,
        n_y: usize,
    },
    DualFailure {
        p: usize,
        l: usize,
        layers: usize,
    },
    File {
        graph: PathBuf,
        #[serde(default)]
        pairs: Option<PathBuf>,
    },
}

impl InstanceSpec {
    pub fn describe(&self) -> String {
        match self {
            InstanceSpec::Random {
                n,
                m,
                strongly_connected,
                pairs,
            } => {
                let sc = if *strongly_connected { ",sc" } else { "" };
                format!("random(n={n},m={m},pairs={pairs}{sc})")
            }
            InstanceSpec::AppendixA { k, n_y } => format!("appendix-a(k={k},n_y={n_y})"),
            InstanceSpec::DualFailure { p, l, layers } => format!("dual-failure(p={p},L={l},K={layers})"),
            InstanceSpec::File { graph, .. } => format!("file({})", graph.display()),
        }
    }

    fn family(&self) -> &'static str {
        match self {
            InstanceSpec::Random { .. } => "random",
            InstanceSpec::AppendixA { .. } => "appendix-a",
            InstanceSpec::DualFailure { .. } => "dual-failure",
            InstanceSpec::File { .. } => "file",
        }
    }

    /// Materializes the graph and pair set; `seed` drives random families.
    pub fn realize(&self, seed: u64) -> Result<(DiGraph, PairSet)> {
        match self {
            InstanceSpec::Random {
                n,
                m,
                strongly_connected,
                pairs,
            } => {
                let g = gen_random_digraph(*n, *m, seed, *strongly_connected)?;
                let p = random_pairs(*n, *pairs, seed.wrapping_add(1));
                Ok((g, p))
            }
            InstanceSpec::AppendixA { k, n_y } => Ok((gen_appendix_a(*k, *n_y)?.graph, PairSet::default())),
            InstanceSpec::DualFailure { p, l, layers } => {
                let base = gen_base_disjoint_paths(*p, *l)?;
                let li = gen_dual_failure_graph(&base, *layers)?;
                Ok((li.g, li.pairs))
            }
            InstanceSpec::File { graph, pairs } => {
                let g = read_graph(graph)?;
                let p = match pairs {
                    Some(path) => read_pairs(path, g.n())?,
                    None => PairSet::default(),
                };
                Ok((g, p))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum BuilderSpec {
    Anchored {
        k: usize,
        #[serde(default)]
        anchor: Vertex,
        #[serde(default = "default_direction")]
        direction: Direction,
    },
    PairwiseMinimal,
    PairwiseGreedy,
    H0,
    #[serde(rename = "1ft-scc")]
    OneFtScc,
    KftScc {
        k: usize,
        #[serde(default)]
        constants: Option<[f64; 3]>,
    },
}

fn default_direction() -> Direction {
    Direction::Out
}

impl BuilderSpec {
    fn name(&self) -> &'static str {
        match self {
            BuilderSpec::Anchored { .. } => "anchored",
            BuilderSpec::PairwiseMinimal => "pairwise-minimal",
            BuilderSpec::PairwiseGreedy => "pairwise-greedy",
            BuilderSpec::H0 => "h0",
            BuilderSpec::OneFtScc => "1ft-scc",
            BuilderSpec::KftScc { .. } => "kft-scc",
        }
    }

    fn budget(&self) -> usize {
        match self {
            BuilderSpec::Anchored { k, .. } | BuilderSpec::KftScc { k, .. } => *k,
            BuilderSpec::PairwiseMinimal | BuilderSpec::PairwiseGreedy | BuilderSpec::OneFtScc => 1,
            BuilderSpec::H0 => 0,
        }
    }
}

/// Every instance crossed with every builder and seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub instances: Vec<InstanceSpec>,
    pub builders: Vec<BuilderSpec>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: String,
    pub sweeps: Vec<Sweep>,
    #[serde(default)]
    pub verify: bool,
    #[serde(default)]
    pub cap: Option<u64>,
    #[serde(default)]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub json: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("experiment config: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Runs in config order: sweeps, instances, builders, seeds.
    pub fn runs(&self) -> Vec<Run> {
        let mut out = Vec::new();
        for sweep in &self.sweeps {
            for instance in &sweep.instances {
                for builder in &sweep.builders {
                    for &seed in &sweep.seeds {
                        out.push(Run {
                            instance: instance.clone(),
                            builder: builder.clone(),
                            seed,
                            verify: self.verify,
                        });
                    }
                }
            }
        }
        out
    }
}

/// One instance-builder-seed combination.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Run {
    pub instance: InstanceSpec,
    pub builder: BuilderSpec,
    pub seed: u64,
    pub verify: bool,
}

impl Run {
    /// Hex SHA-256 of the run's canonical JSON.
    pub fn config_hash(&self) -> String {
        let text = serde_json::to_string(self).expect("run serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Passed,
    Failed,
    BudgetExceeded,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub instance: String,
    pub family: String,
    pub method: String,
    pub n: usize,
    pub m: usize,
    pub pairs: usize,
    pub k: usize,
    pub edges: usize,
    pub reference_label: String,
    pub reference: f64,
    pub reference2_label: String,
    pub reference2: Option<f64>,
    pub build_ms: f64,
    pub verify_ms: Option<f64>,
    pub outcome: Outcome,
    pub retries: usize,
    pub seed: u64,
    pub config_hash: String,
}

impl BenchRecord {
    /// Fields that do not depend on timing.
    pub fn without_timing(&self) -> BenchRecord {
        BenchRecord {
            build_ms: 0.0,
            verify_ms: self.verify_ms.map(|_| 0.0),
            ..self.clone()
        }
    }
}

/// Reference curves: `(label, value)` primary and optional secondary.
pub fn reference_values(builder: &BuilderSpec, n: usize, pairs: usize) -> ((String, f64), Option<(String, f64)>) {
    let nf = n as f64;
    let pf = pairs as f64;
    let kft = |k: usize| k as f64 * 2f64.powi(k as i32) * nf.powf(2.0 - 1.0 / k as f64);
    match builder {
        BuilderSpec::Anchored { k, .. } => (("2^k n".into(), 2f64.powi(*k as i32) * nf), None),
        BuilderSpec::PairwiseMinimal | BuilderSpec::PairwiseGreedy => (
            ("n + |P| sqrt(n)".into(), nf + pf * nf.sqrt()),
            Some(("n sqrt(|P|)".into(), nf * pf.sqrt())),
        ),
        BuilderSpec::H0 => (("2n".into(), 2.0 * nf), None),
        BuilderSpec::OneFtScc => (("k 2^k n^(2-1/k)".into(), kft(1)), None),
        BuilderSpec::KftScc { k, .. } => (("k 2^k n^(2-1/k)".into(), kft(*k)), None),
    }
}

fn outcome_of(result: Result<VerificationReport>) -> Result<Outcome> {
    match result {
        Ok(r) if r.passed() => Ok(Outcome::Passed),
        Ok(_) => Ok(Outcome::Failed),
        Err(Error::BudgetExceeded { .. }) => Ok(Outcome::BudgetExceeded),
        Err(e) => Err(e),
    }
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Builds (and optionally verifies) one run.
pub fn run_one(run: &Run, opts: &VerifyOptions) -> Result<BenchRecord> {
    let (g, pairs) = run.instance.realize(run.seed)?;
    let build = BuildOptions {
        certify: false,
        verify: *opts,
    };
    let start = Instant::now();
    let mut retries = 0;
    let h: Subgraph<'_> = match &run.builder {
        BuilderSpec::Anchored { k, anchor, direction } => {
            build_anchored_ftrs_with(&g, *anchor, *direction, *k, &build)?.edges.subgraph
        }
        BuilderSpec::PairwiseMinimal => build_pairwise_ftrs_minimal_with(&g, &pairs, &build)?.subgraph,
        BuilderSpec::PairwiseGreedy => build_pairwise_ftrs_greedy_with(&g, &pairs, &build)?.subgraph,
        BuilderSpec::H0 => build_h0(&g, &OrderedList::identity(g.n()))?,
        BuilderSpec::OneFtScc => build_1ft_scc_with(&g, false, &build)?.subgraph,
        BuilderSpec::KftScc { k, constants } => {
            let mut kopts = KftOptions {
                build: BuildOptions {
                    certify: run.verify,
                    verify: *opts,
                },
                ..Default::default()
            };
            if let Some([c_l, c_p, c_q]) = *constants {
                kopts.constants = Constants { c_l, c_p, c_q };
            }
            let p = build_kft_scc_with(&g, *k, run.seed, &kopts)?;
            retries = retries_of(&p);
            p.subgraph
        }
    };
    let build_ms = ms(start);
    let k = run.builder.budget();
    let (outcome, verify_ms) = if run.verify {
        let start = Instant::now();
        let outcome = match &run.builder {
            BuilderSpec::Anchored { anchor, direction, .. } => {
                outcome_of(verify_ftrs(&g, &h, &anchored_pairs(*anchor, *direction, g.n()), k, opts))?
            }
            BuilderSpec::PairwiseMinimal | BuilderSpec::PairwiseGreedy => {
                outcome_of(verify_ftrs(&g, &h, &pairs, 1, opts))?
            }
            BuilderSpec::H0 => {
                if check_prefix_property(&g, &h, &OrderedList::identity(g.n())) {
                    Outcome::Passed
                } else {
                    Outcome::Failed
                }
            }
            BuilderSpec::OneFtScc | BuilderSpec::KftScc { .. } => outcome_of(verify_scc_preserver(&g, &h, k, opts))?,
        };
        (outcome, Some(ms(start)))
    } else {
        (Outcome::Skipped, None)
    };
    let ((label, reference), second) = reference_values(&run.builder, g.n(), pairs.len());
    let (reference2_label, reference2) = match second {
        Some((l, v)) => (l, Some(v)),
        None => (String::new(), None),
    };
    Ok(BenchRecord {
        instance: run.instance.describe(),
        family: run.instance.family().into(),
        method: run.builder.name().into(),
        n: g.n(),
        m: g.m(),
        pairs: pairs.len(),
        k,
        edges: h.edge_count(),
        reference_label: label,
        reference,
        reference2_label,
        reference2,
        build_ms,
        verify_ms,
        outcome,
        retries,
        seed: run.seed,
        config_hash: run.config_hash(),
    })
}

/// Runs every combination in parallel, merges records in config order, and
/// writes the CSV and JSON reports when paths are configured.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<BenchRecord>> {
    let opts = cfg.cap.map(VerifyOptions::with_cap).unwrap_or_else(VerifyOptions::from_env);
    let records: Vec<BenchRecord> = cfg
        .runs()
        .par_iter()
        .map(|run| {
            run_one(run, &opts).map_err(|e| {
                e.context(format!(
                    "{} on {} (seed {})",
                    run.builder.name(),
                    run.instance.describe(),
                    run.seed
                ))
            })
        })
        .collect::<Result<_>>()?;
    if let Some(path) = &cfg.csv {
        write_csv(&records, path)?;
    }
    if let Some(path) = &cfg.json {
        write_json(cfg, &records, path)?;
    }
    Ok(records)
}

pub fn records_to_csv(records: &[BenchRecord]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in records {
        w.serialize(r).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

pub fn records_from_csv(text: &str) -> Result<Vec<BenchRecord>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.deserialize().map(|row| row.map_err(csv_err)).collect()
}

/// Column order of the CSV report.
pub const CSV_HEADER: [&str; 18] = [
    "instance",
    "family",
    "method",
    "n",
    "m",
    "pairs",
    "k",
    "edges",
    "reference_label",
    "reference",
    "reference2_label",
    "reference2",
    "build_ms",
    "verify_ms",
    "outcome",
    "retries",
    "seed",
    "config_hash",
];

fn csv_err(e: csv::Error) -> Error {
    Error::Io(format!("csv: {e}"))
}

/// Appends to an existing report (header written only for a new file).
pub fn write_csv(records: &[BenchRecord], path: &Path) -> Result<()> {
    use std::io::Write;
    let text = records_to_csv(records)?;
    let exists = path.exists() && std::fs::metadata(path)?.len() > 0;
    let mut file = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
    let body = if exists {
        text.split_once('\n').map_or("", |(_, rest)| rest)
    } else {
        &text
    };
    file.write_all(body.as_bytes())?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
pub struct JsonReport {
    pub config: ExperimentConfig,
    pub records: Vec<BenchRecord>,
}

pub fn write_json(cfg: &ExperimentConfig, records: &[BenchRecord], path: &Path) -> Result<()> {
    let report = JsonReport {
        config: cfg.clone(),
        records: records.to_vec(),
    };
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    std::fs::write(path, text)?;
    Ok(())
}

/// Size-trend sweeps with verification off: anchored, pairwise and SCC
/// builders on random graphs with `m = 3n`.
pub fn size_trend_config() -> ExperimentConfig {
    let random = |ns: &[usize], pairs_per_n: usize, sc: bool| -> Vec<InstanceSpec> {
        ns.iter()
            .map(|&n| InstanceSpec::Random {
                n,
                m: 3 * n,
                strongly_connected: sc,
                pairs: if pairs_per_n == 0 { 0 } else { n / pairs_per_n },
            })
            .collect()
    };
    let anchored = |k: usize| BuilderSpec::Anchored {
        k,
        anchor: 0,
        direction: Direction::Out,
    };
    let sweep = |instances, builders| Sweep {
        instances,
        builders,
        seeds: vec![1],
    };
    ExperimentConfig {
        name: "size-trend".into(),
        sweeps: vec![
            sweep(random(&[25, 50, 100, 200, 300], 0, true), vec![anchored(1)]),
            sweep(random(&[10, 20, 30, 40], 0, true), vec![anchored(2)]),
            sweep(
                random(&[25, 50, 100, 200], 5, false),
                vec![BuilderSpec::PairwiseMinimal, BuilderSpec::PairwiseGreedy],
            ),
            sweep(random(&[25, 50, 100, 200, 300], 0, true), vec![BuilderSpec::H0, BuilderSpec::OneFtScc]),
            sweep(random(&[10, 20, 30], 0, true), vec![BuilderSpec::KftScc { k: 2, constants: None }]),
        ],
        verify: false,
        cap: None,
        csv: None,
        json: None,
    }
}
