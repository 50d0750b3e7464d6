//! Acceptance suite: one line per criterion, nonzero exit if any fails.

mod common;

use ftsparse::experiment::{run_experiment, size_trend_config, Outcome};
use ftsparse::ftrs::{build_pair_ftrs, build_pairwise_ftrs_greedy, build_pairwise_ftrs_minimal};
use ftsparse::lowerbound::{
    appendix_a_edge_count, check_appendix_a_forcing, check_forced_paths, gen_appendix_a, gen_base_disjoint_paths,
    gen_dual_failure_graph,
};
use ftsparse::path::path_edge_ids;
use ftsparse::random::{gen_random_digraph, random_pairs};
use ftsparse::scc::{build_1ft_scc, build_h0, build_kft_scc, retries_of, OrderedList};
use ftsparse::split::split_vertices;
use ftsparse::verify::{
    is_minimal, verify_connectivity_certificate, verify_ftrs, verify_scc_preserver, verify_split_vertex_certificate,
    ConnectivityMode, Requirement,
};
use ftsparse::{DiGraph, EdgeView, PairSet, Provenance, VerifyOptions};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<String, String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("{what} took {took:.1?}, limit {limit:?}"))?;
    Ok(format!("{what} in {took:.1?}"))
}

/// Random `(n, m)` with `n` in `lo..=hi_n` and `m <= hi_m`.
fn random_graph(rng: &mut ChaCha8Rng, lo: usize, hi_n: usize, hi_m: usize, sc: bool) -> DiGraph {
    let n = rng.gen_range(lo..=hi_n);
    let min_m = if sc { n } else { 0 };
    let max_m = hi_m.min(n * (n - 1));
    let m = rng.gen_range(min_m..=max_m);
    gen_random_digraph(n, m, rng.gen(), sc).unwrap()
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for i in 0..200 {
        let g = random_graph(&mut rng, 2, 12, 40, false);
        let mut order: Vec<usize> = (0..g.n()).collect();
        order.shuffle(&mut rng);
        let h = build_h0(&g, &OrderedList::new(order.clone(), g.n()).unwrap()).map_err(|e| e.to_string())?;
        ensure(h.edge_count() <= 2 * g.n(), || format!("instance {i}: {} edges > 2n", h.edge_count()))?;
        let mut keep = vec![false; g.n()];
        for (j, &v) in order.iter().enumerate() {
            keep[v] = true;
            let prefix = |e: usize| {
                let (a, b) = g.edge(e);
                keep[a] && keep[b]
            };
            let lg = common::scc_labels(&g, prefix);
            let lh = common::scc_labels(&g, |e| prefix(e) && h.contains(e));
            let lg: Vec<_> = (0..g.n()).filter(|&x| keep[x]).map(|x| lg[x]).collect();
            let lh: Vec<_> = (0..g.n()).filter(|&x| keep[x]).map(|x| lh[x]).collect();
            ensure(lg == lh, || format!("instance {i}: prefix {} differs", j + 1))?;
        }
    }
    within(start, Duration::from_secs(30), "200 instances, size and every prefix")
}

fn criterion_2() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let opts = VerifyOptions::default();
    for i in 0..200 {
        let g = random_graph(&mut rng, 2, 10, 30, true);
        let p = build_1ft_scc(&g).map_err(|e| e.to_string())?;
        let report = verify_scc_preserver(&g, &p.subgraph, 1, &opts).map_err(|e| e.to_string())?;
        ensure(report.passed(), || format!("instance {i}: {:?}", report.counterexample()))?;
        ensure(common::scc_preserved(&g, &p.edge_ids(), 1), || format!("instance {i}: oracle disagrees"))?;
    }
    Ok(format!("200 strongly connected instances in {:.1?}", start.elapsed()))
}

fn criterion_3() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let opts = VerifyOptions::default();
    let mut retries = 0;
    for i in 0..50 {
        let g = random_graph(&mut rng, 3, 9, 24, true);
        let seed = rng.gen();
        let p = build_kft_scc(&g, 2, seed).map_err(|e| e.to_string())?;
        ensure(p.is_verified(), || format!("instance {i}: not verified"))?;
        let report = verify_scc_preserver(&g, &p.subgraph, 2, &opts).map_err(|e| e.to_string())?;
        ensure(report.passed(), || format!("instance {i}: {:?}", report.counterexample()))?;
        ensure(common::scc_preserved(&g, &p.edge_ids(), 2), || format!("instance {i}: oracle disagrees"))?;
        retries += retries_of(&p);
    }
    let mean = retries as f64 / 50.0;
    ensure(mean <= 2.0, || format!("mean retries {mean:.2} > 2"))?;
    let timing = within(start, Duration::from_secs(300), "50 instances")?;
    Ok(format!("{timing}, mean retries {mean:.2}"))
}

fn criterion_4() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let opts = VerifyOptions::default();
    let mut decompositions = 0;
    for i in 0..100 {
        let n = rng.gen_range(3..=10);
        let m = rng.gen_range(n..=(3 * n).min(n * (n - 1)));
        let g = gen_random_digraph(n, m, rng.gen(), false).unwrap();
        let pairs = random_pairs(n, rng.gen_range(1..=6), rng.gen());
        let raw: Vec<_> = pairs.iter().copied().collect();
        for (name, p) in [
            ("minimal", build_pairwise_ftrs_minimal(&g, &pairs)),
            ("greedy", build_pairwise_ftrs_greedy(&g, &pairs)),
        ] {
            let p = p.map_err(|e| format!("instance {i} {name}: {e}"))?;
            let report = verify_ftrs(&g, &p.subgraph, &pairs, 1, &opts).map_err(|e| e.to_string())?;
            ensure(report.passed(), || format!("instance {i} {name}: {:?}", report.counterexample()))?;
            ensure(common::ftrs_preserved(&g, &p.edge_ids(), &raw, 1), || {
                format!("instance {i} {name}: oracle disagrees")
            })?;
            if name == "minimal" {
                let min = is_minimal(&g, &p.subgraph, Requirement::Pairs(&pairs), 1, &opts).map_err(|e| e.to_string())?;
                ensure(min.minimal, || format!("instance {i}: edge {:?} removable", min.removable_edge))?;
            }
        }
        for &(s, t) in &raw {
            let pf = build_pair_ftrs(&g, s, t).map_err(|e| format!("instance {i} pair ({s},{t}): {e}"))?;
            let Some((q, q2)) = &pf.paths else {
                ensure(!common::reaches(&g, |_| true, s, t), || format!("instance {i}: missing paths"))?;
                continue;
            };
            decompositions += 1;
            let alive: Vec<bool> = (0..g.m()).map(|e| pf.edges.contains(e)).collect();
            let eq = path_edge_ids(&g, q).ok_or("Q is not a path")?;
            let eq2 = path_edge_ids(&g, q2).ok_or("Q~ is not a path")?;
            let mut union: Vec<_> = eq.iter().chain(&eq2).copied().collect();
            union.sort_unstable();
            union.dedup();
            ensure(union == pf.edges.edge_ids(), || format!("instance {i} ({s},{t}): union differs"))?;
            let cut = common::cut_edges(&g, &alive, s, t);
            ensure(eq.iter().filter(|e| eq2.contains(e)).all(|e| cut.contains(e)), || {
                format!("instance {i} ({s},{t}): shared non-cut edge")
            })?;
            let paths = common::simple_paths(&g, &alive, s, t);
            for c in common::minimal_cuts(&g, &alive, s, t, 2) {
                for path in &paths {
                    let hits = path.iter().filter(|e| c.contains(e)).count();
                    ensure(hits == 1, || format!("instance {i} ({s},{t}): path meets cut {c:?} {hits} times"))?;
                }
            }
        }
    }
    Ok(format!("100 instances, {decompositions} pair decompositions checked"))
}

fn greedy_bounds(g: &DiGraph, pairs: &PairSet) -> Result<usize, String> {
    let p = build_pairwise_ftrs_greedy(g, pairs).map_err(|e| e.to_string())?;
    let Provenance::PairwiseGreedy { hubs, max_freq, .. } = &p.provenance else {
        return Err("unexpected provenance".into());
    };
    let total = pairs.len();
    ensure(hubs.len() * hubs.len() <= 4 * total, || format!("|W| = {} for |P| = {total}", hubs.len()))?;
    ensure(max_freq * max_freq <= total, || format!("max freq {max_freq} for |P| = {total}"))?;
    // recount frequencies over the surviving paths.
    let mut freq = vec![0usize; g.n()];
    for &(s, t) in pairs {
        let pf = build_pair_ftrs(g, s, t).map_err(|e| e.to_string())?;
        if let Some((q, q2)) = pf.paths {
            for path in [q, q2] {
                if !path.iter().any(|v| hubs.contains(v)) {
                    for v in path {
                        freq[v] += 1;
                    }
                }
            }
        }
    }
    let recount = freq.into_iter().max().unwrap_or(0);
    ensure(recount * recount <= total, || format!("recounted freq {recount} for |P| = {total}"))?;
    Ok(hubs.len())
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut runs = 0;
    let mut with_hubs = 0;
    for _ in 0..100 {
        let n = rng.gen_range(3..=10);
        let m = rng.gen_range(n..=(3 * n).min(n * (n - 1)));
        let g = gen_random_digraph(n, m, rng.gen(), false).unwrap();
        let pairs = random_pairs(n, rng.gen_range(1..=6), rng.gen());
        with_hubs += usize::from(greedy_bounds(&g, &pairs)? > 0);
        runs += 1;
    }
    for _ in 0..30 {
        let n = rng.gen_range(8..=20);
        let g = gen_random_digraph(n, 3 * n, rng.gen(), true).unwrap();
        let pairs = random_pairs(n, rng.gen_range(4..=30), rng.gen());
        with_hubs += usize::from(greedy_bounds(&g, &pairs)? > 0);
        runs += 1;
    }
    Ok(format!("{runs} runs ({with_hubs} with hubs)"))
}

fn criterion_6() -> Check {
    let opts = VerifyOptions::default();
    let mut edges = 0;
    for k in 1..=2 {
        for n_y in 1..=3 {
            let inst = gen_appendix_a(k, n_y).map_err(|e| e.to_string())?;
            let g = &inst.graph;
            let expected = (1usize << (k + 1)) - 2 + (1usize << k) * n_y + n_y;
            ensure(g.m() == expected && appendix_a_edge_count(k, n_y) == expected, || {
                format!("k={k}, n_y={n_y}: {} edges, expected {expected}", g.m())
            })?;
            let report = check_appendix_a_forcing(g, k, &opts).map_err(|e| e.to_string())?;
            ensure(report.passed(), || format!("k={k}, n_y={n_y}: {:?}", report.counterexample()))?;
            let all: Vec<usize> = (0..g.m()).collect();
            for e in 0..g.m() {
                let rest: Vec<usize> = all.iter().copied().filter(|&x| x != e).collect();
                ensure(!common::scc_preserved(g, &rest, k), || format!("k={k}, n_y={n_y}: edge {e} not critical"))?;
            }
            edges += g.m();
        }
    }
    Ok(format!("6 instances, all {edges} edges critical"))
}

fn criterion_7() -> Check {
    let start = Instant::now();
    let opts = VerifyOptions::default();
    let mut instances = 0;
    let mut forced_total = 0;
    for p in 1..=3 {
        for l in 1..=3 {
            for layers in l..=3 {
                let base = gen_base_disjoint_paths(p, l).map_err(|e| e.to_string())?;
                let li = gen_dual_failure_graph(&base, layers).map_err(|e| e.to_string())?;
                let fp = check_forced_paths(&li, &base).map_err(|e| e.to_string())?;
                let tag = format!("p={p}, L={l}, K={layers}");
                ensure(fp.report.passed(), || format!("{tag}: {:?}", fp.report.counterexample()))?;
                ensure(fp.forced_edges.len() == layers * l * p, || {
                    format!("{tag}: {} forced edges", fp.forced_edges.len())
                })?;
                for q in &fp.queries {
                    let (s, t) = li.pairs.as_slice()[q.pair];
                    let failed = |e: usize| !q.failures.contains(&e);
                    ensure(common::reaches(&li.g, failed, s, t), || format!("{tag}: query unreachable"))?;
                    for &e in &q.forced {
                        ensure(!common::reaches(&li.g, |x| failed(x) && x != e, s, t), || {
                            format!("{tag}: edge {e} not forced by its failure")
                        })?;
                    }
                }
                for &e in &fp.forced_edges {
                    let h = li.g.full().with_removed(e);
                    let report = verify_ftrs(&li.g, &h, &li.pairs, 2, &opts).map_err(|e| e.to_string())?;
                    ensure(!report.passed(), || format!("{tag}: G - {e} still passes at k = 2"))?;
                }
                instances += 1;
                forced_total += fp.forced_edges.len();
            }
        }
    }
    Ok(format!(
        "{instances} layered instances, {forced_total} forced edges, {:.1?}",
        start.elapsed()
    ))
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut certified = 0;
    for i in 0..50 {
        let n = rng.gen_range(3..=10);
        let m = rng.gen_range(n..=(3 * n).min(n * (n - 1)));
        let g = gen_random_digraph(n, m, rng.gen(), rng.gen_bool(0.7)).unwrap();
        let seed = rng.gen();
        for k in 2..=3 {
            let h = build_kft_scc(&g, k - 1, seed).map_err(|e| e.to_string())?;
            let report =
                verify_connectivity_certificate(&g, &h.subgraph, k, ConnectivityMode::Edge).map_err(|e| e.to_string())?;
            ensure(report.passed(), || format!("instance {i}, k={k}, edge mode: {:?}", report.counterexample()))?;
            let all = vec![true; g.m()];
            let kept: Vec<bool> = (0..g.m()).map(|e| h.subgraph.contains(e)).collect();
            for x in 0..n {
                for y in x + 1..n {
                    if common::k_edge_connected(&g, &all, x, y, k) {
                        ensure(common::k_edge_connected(&g, &kept, x, y, k), || {
                            format!("instance {i}, k={k}: oracle loses ({x},{y})")
                        })?;
                    }
                }
            }
            let split = split_vertices(&g, &[]);
            let hs = build_kft_scc(&split.graph, k - 1, seed).map_err(|e| e.to_string())?;
            let report = verify_split_vertex_certificate(&split, &hs.subgraph, k).map_err(|e| e.to_string())?;
            ensure(report.passed(), || format!("instance {i}, k={k}, vertex mode: {:?}", report.counterexample()))?;
            certified += 2;
        }
    }
    Ok(format!("{certified} certificates (edge and vertex mode) over 50 graphs"))
}

fn criterion_9() -> Check {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut cfg = size_trend_config();
    cfg.csv = Some(dir.path().join("size_trend.csv"));
    cfg.json = Some(dir.path().join("size_trend.json"));
    let records = run_experiment(&cfg).map_err(|e| e.to_string())?;
    ensure(!records.is_empty(), || "no records".into())?;
    ensure(records.iter().all(|r| r.outcome == Outcome::Skipped && r.reference > 0.0), || {
        "unexpected record".into()
    })?;
    let csv = std::fs::read_to_string(cfg.csv.as_ref().unwrap()).map_err(|e| e.to_string())?;
    ensure(csv.lines().count() == records.len() + 1, || "csv row count".into())?;
    ensure(cfg.json.as_ref().unwrap().exists(), || "json missing".into())?;
    println!("  {:<34} {:<17} {:>5} {:>6} {:>7} {:>11} {:>11}", "instance", "method", "n", "m", "edges", "reference", "reference2");
    for r in &records {
        let second = r.reference2.map_or(String::new(), |v| format!("{v:.0}"));
        println!(
            "  {:<34} {:<17} {:>5} {:>6} {:>7} {:>11.0} {:>11}",
            r.instance, r.method, r.n, r.m, r.edges, r.reference, second
        );
    }
    let max_n = records.iter().map(|r| r.n).max().unwrap_or(0);
    let timing = within(start, Duration::from_secs(600), &format!("{} records up to n = {max_n}", records.len()))?;
    Ok(timing)
}

fn main() {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("H0 size bound and prefix components", criterion_1),
        ("1-FT-SCC exhaustive correctness", criterion_2),
        ("2-FT-SCC with verify-and-retry", criterion_3),
        ("pairwise builders and two-path structure", criterion_4),
        ("greedy frequency and hub bounds", criterion_5),
        ("binary-tree instances fully critical", criterion_6),
        ("layered instances force their paths", criterion_7),
        ("connectivity certificates from FT-SCC", criterion_8),
        ("size-trend report", criterion_9),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = format!("criterion {}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| id.contains(f.as_str()) || name.contains(f.as_str())) {
            continue;
        }
        match run() {
            Ok(detail) => println!("{id}: PASS {name} ({detail})"),
            Err(why) => {
                failed += 1;
                println!("{id}: FAIL {name} ({why})");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
