//! Fault-tolerant strong-connectivity preservers.

use crate::error::{Error, Result};
use crate::ftrs::prune_anchored;
use crate::graph::{DiGraph, EdgeMask, EdgeView, Subgraph, Vertex};
use crate::preserver::{certify, BuildOptions, Certification, Preserver, Provenance, Sampling};
use crate::reach::{scc_decompose, Bfs, Direction};
use crate::verify::verify_scc_preserver;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::HashSet;

/// A permutation `(v_1, ..., v_n)` of the vertex ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedList(Vec<Vertex>);

impl OrderedList {
    pub fn new(order: Vec<Vertex>, n: usize) -> Result<Self> {
        let mut seen = vec![false; n];
        if order.len() != n {
            return Err(Error::InvalidOrder { n });
        }
        for &v in &order {
            if v >= n || seen[v] {
                return Err(Error::InvalidOrder { n });
            }
            seen[v] = true;
        }
        Ok(OrderedList(order))
    }

    pub fn identity(n: usize) -> Self {
        OrderedList((0..n).collect())
    }

    pub fn as_slice(&self) -> &[Vertex] {
        &self.0
    }
}

/// Incremental preserver of prefix strong connectivity: for every `i`,
/// `H_0[v_1..v_i]` and `G[v_1..v_i]` have the same components. At most `2n`
/// edges.
pub fn build_h0<'g>(g: &'g DiGraph, order: &OrderedList) -> Result<Subgraph<'g>> {
    if order.0.len() != g.n() {
        return Err(Error::InvalidOrder { n: g.n() });
    }
    let h = h0_rounds(&g.full(), &order.0);
    assert!(h.edge_count() <= 2 * g.n(), "H0 has {} edges for n = {}", h.edge_count(), g.n());
    Ok(h)
}

/// The rounds of [`build_h0`] over `base`, for any sequence of distinct
/// vertices (vertices not listed never enter the prefix).
pub(crate) fn h0_rounds<'g>(base: &Subgraph<'g>, order: &[Vertex]) -> Subgraph<'g> {
    let g = base.parent();
    let n = g.n();
    let mut h = g.empty_subgraph();
    let mut in_prefix = vec![false; n];
    let mut in_c = vec![false; n];
    let mut bfs = Bfs::new(n);
    let mut node = vec![usize::MAX; n];
    for &v in order {
        in_prefix[v] = true;
        let prefix = base.induced(&in_prefix);
        let forward: Vec<Vertex> = bfs.run(&prefix, &[v], Direction::Out).to_vec();
        bfs.run(&prefix, &[v], Direction::In);
        let comp: Vec<Vertex> = forward.into_iter().filter(|&x| bfs.reached(x)).collect();
        if comp.len() == 1 {
            continue;
        }
        for &x in &comp {
            in_c[x] = true;
        }
        in_c[v] = false;
        let labels = scc_decompose(&base.induced(&in_c));
        in_c[v] = true;
        // supernode ids: 0 for v, then 1 + label of the rest.
        for &x in &comp {
            node[x] = if x == v { 0 } else { 1 + labels.component_of(x) };
        }
        let inside = base.induced(&in_c);
        for dir in [Direction::Out, Direction::In] {
            for e in supernode_tree(&inside, &comp, &node, v, dir) {
                h.insert(e);
            }
        }
        for &x in &comp {
            in_c[x] = false;
            node[x] = usize::MAX;
        }
    }
    h
}

/// True iff `h` and `g` have the same components on every prefix of `order`.
pub fn check_prefix_property(g: &DiGraph, h: &Subgraph<'_>, order: &OrderedList) -> bool {
    let mut keep = vec![false; g.n()];
    order.0.iter().all(|&v| {
        keep[v] = true;
        scc_decompose(&g.induced(&keep)) == scc_decompose(&h.induced(&keep))
    })
}

/// BFS tree over contracted supernodes rooted at `root`, one edge per tree
/// arc (the smallest id realizing it).
fn supernode_tree<V: EdgeView>(
    view: &V,
    comp: &[Vertex],
    node: &[usize],
    root: Vertex,
    dir: Direction,
) -> Vec<usize> {
    let g = view.graph();
    let mut members: Vec<Vec<Vertex>> = Vec::new();
    for &x in comp {
        let id = node[x];
        if members.len() <= id {
            members.resize(id + 1, Vec::new());
        }
        members[id].push(x);
    }
    let mut reached = vec![false; members.len()];
    reached[node[root]] = true;
    let mut queue = vec![node[root]];
    let mut tree = Vec::new();
    let mut qi = 0;
    while qi < queue.len() {
        let a = queue[qi];
        qi += 1;
        let mut arcs: Vec<(usize, Vertex)> = Vec::new();
        for &x in &members[a] {
            match dir {
                Direction::Out => arcs.extend(g.out_edges(x).map(|e| (e, g.head(e)))),
                Direction::In => arcs.extend(g.in_edges(x).iter().map(|&e| (e, g.tail(e)))),
            }
        }
        arcs.sort_unstable();
        for (e, y) in arcs {
            if !view.contains(e) {
                continue;
            }
            let b = node[y];
            if !reached[b] {
                reached[b] = true;
                tree.push(e);
                queue.push(b);
            }
        }
    }
    tree
}

/// Vertices of `comp` by decreasing BFS depth from `root`, ties by id.
fn depth_order<V: EdgeView>(view: &V, comp: &[Vertex], root: Vertex, dir: Direction) -> Vec<Vertex> {
    let mut bfs = Bfs::new(view.graph().n());
    bfs.run(view, &[root], dir);
    let mut order = comp.to_vec();
    order.sort_by_key(|&v| (std::cmp::Reverse(bfs.depth(v).unwrap_or(0)), v));
    order
}

/// Mask of `base` edges with both endpoints in `comp`.
fn component_mask(base: &Subgraph<'_>, inside: &[bool]) -> EdgeMask {
    let g = base.parent();
    let mut mask = EdgeMask::new(g.m());
    for e in base.mask().iter() {
        let (u, v) = g.edge(e);
        if inside[u] && inside[v] {
            mask.insert(e);
        }
    }
    mask
}

/// Single-failure SCC preserver, built independently inside every
/// non-singleton component of `base`.
pub(crate) fn one_ft_scc_on<'g>(base: &Subgraph<'g>, whole_graph: bool) -> Result<Subgraph<'g>> {
    let g = base.parent();
    let part = scc_decompose(base);
    let mut h = g.empty_subgraph();
    let mut inside = vec![false; g.n()];
    let opts = BuildOptions::unverified();
    for comp in part.components().iter().filter(|c| c.len() > 1) {
        for &v in comp {
            inside[v] = true;
        }
        let local = Subgraph::new(g, component_mask(base, &inside))?;
        let s = comp[0];
        let mut part_h = prune_anchored(&local, s, Direction::Out, 1, &opts)?;
        part_h.union_with(prune_anchored(&local, s, Direction::In, 1, &opts)?.mask());
        let h1 = part_h.edge_count();
        for dir in [Direction::Out, Direction::In] {
            let order = depth_order(&local, comp, s, dir);
            part_h.union_with(h0_rounds(&local, &order).mask());
        }
        assert!(part_h.edge_count() <= h1 + 4 * comp.len());
        h.union_with(part_h.mask());
        for &v in comp {
            inside[v] = false;
        }
    }
    if whole_graph {
        let mut links = HashSet::new();
        for e in base.mask().iter() {
            let (u, v) = g.edge(e);
            let (a, b) = (part.component_of(u), part.component_of(v));
            if a != b && links.insert((a, b)) {
                h.insert(e);
            }
        }
    }
    Ok(h)
}

pub fn build_1ft_scc(g: &DiGraph) -> Result<Preserver<'_>> {
    build_1ft_scc_with(g, false, &BuildOptions::default())
}

/// `whole_graph` adds one edge per condensation arc (not fault tolerant).
pub fn build_1ft_scc_with<'g>(g: &'g DiGraph, whole_graph: bool, opts: &BuildOptions) -> Result<Preserver<'g>> {
    let h = one_ft_scc_on(&g.full(), whole_graph)?;
    let certification = if opts.certify {
        certify("1-FT-SCC", verify_scc_preserver(g, &h, 1, &opts.verify))?
    } else {
        Certification::Unverified {
            reason: "certification disabled".into(),
        }
    };
    Ok(Preserver {
        subgraph: h,
        provenance: Provenance::OneFtScc { whole_graph },
        certification,
    })
}

pub const DESK_C_L: f64 = 4.0;
pub const DESK_C_P: f64 = 2.0;
pub const DESK_C_Q: f64 = 0.25;
pub const ANALYSIS_C_L: f64 = 16.0;
pub const ANALYSIS_C_P: f64 = 2.0;
pub const ANALYSIS_C_Q: f64 = 16.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Constants {
    pub c_l: f64,
    pub c_p: f64,
    pub c_q: f64,
}

impl Constants {
    pub const DESK: Constants = Constants {
        c_l: DESK_C_L,
        c_p: DESK_C_P,
        c_q: DESK_C_Q,
    };
    pub const ANALYSIS: Constants = Constants {
        c_l: ANALYSIS_C_L,
        c_p: ANALYSIS_C_P,
        c_q: ANALYSIS_C_Q,
    };
}

impl Default for Constants {
    fn default() -> Self {
        Constants::DESK
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProcedureBParams {
    /// Failures added on top of the inner builder's budget.
    pub k: usize,
    /// Inner builder's budget.
    pub r: usize,
    pub alpha: f64,
    pub iterations: usize,
    pub edge_sample_prob: f64,
    pub anchor_count: usize,
    pub constants: Constants,
    pub seed: u64,
}

impl ProcedureBParams {
    /// Rounds `ceil(c_L n^{k alpha} ln n)`, probability `min(1, c_p / n^alpha)`,
    /// anchors `ceil(c_q (k + r) n^{1 - alpha} ln n)`.
    pub fn with_defaults(n: usize, k: usize, r: usize, alpha: f64, constants: Constants, seed: u64) -> Self {
        let nf = n.max(1) as f64;
        let ln = nf.ln();
        let iterations = (constants.c_l * nf.powf(k as f64 * alpha) * ln).ceil() as usize;
        let edge_sample_prob = (constants.c_p / nf.powf(alpha)).min(1.0);
        let anchor_count = (constants.c_q * (k + r) as f64 * nf.powf(1.0 - alpha) * ln).ceil() as usize;
        ProcedureBParams {
            k,
            r,
            alpha,
            iterations,
            edge_sample_prob,
            anchor_count,
            constants,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidParameter(format!("alpha {} outside [0, 1]", self.alpha)));
        }
        if !(0.0..=1.0).contains(&self.edge_sample_prob) {
            return Err(Error::InvalidParameter(format!(
                "edge sample probability {} outside [0, 1]",
                self.edge_sample_prob
            )));
        }
        Ok(())
    }
}

/// Inner r-FT-SCC builder applied to `g - J`.
pub trait InnerBuilder: Sync {
    fn build<'g>(&self, base: &Subgraph<'g>) -> Result<Subgraph<'g>>;
}

impl<F> InnerBuilder for F
where
    F: for<'g> Fn(&Subgraph<'g>) -> Result<Subgraph<'g>> + Sync,
{
    fn build<'g>(&self, base: &Subgraph<'g>) -> Result<Subgraph<'g>> {
        self(base)
    }
}

/// The single-failure builder as an inner callback.
pub fn one_ft_inner<'g>(base: &Subgraph<'g>) -> Result<Subgraph<'g>> {
    one_ft_scc_on(base, false)
}

/// Certificates of the components of `base`: exact for budget zero.
pub fn certificate_inner<'g>(base: &Subgraph<'g>) -> Result<Subgraph<'g>> {
    let g = base.parent();
    let mut h = g.empty_subgraph();
    for comp in scc_decompose(base).components().iter().filter(|c| c.len() > 1) {
        for e in crate::reach::certificate(comp, base)? {
            h.insert(e);
        }
    }
    Ok(h)
}

/// Lifts an r-FT-SCC builder to budget `k + r` by sampling failure
/// supersets `J` and anchor vertices `W`.
pub fn build_procedure_b<'g, I: InnerBuilder>(
    g: &'g DiGraph,
    params: &ProcedureBParams,
    inner: &I,
) -> Result<Preserver<'g>> {
    let (h, sampling) = procedure_b(&g.full(), params, inner)?;
    Ok(Preserver::unverified(h, Provenance::ProcedureB(sampling), "not certified"))
}

pub(crate) fn procedure_b<'g, I: InnerBuilder>(
    base: &Subgraph<'g>,
    params: &ProcedureBParams,
    inner: &I,
) -> Result<(Subgraph<'g>, Sampling)> {
    params.validate()?;
    let g = base.parent();
    let n = g.n();
    let mut anchor_count = params.anchor_count;
    if anchor_count > n {
        log::warn!("anchor count {anchor_count} exceeds n = {n}; using all vertices");
        anchor_count = n;
    }
    let p = params.edge_sample_prob;
    let rounds: Vec<(EdgeMask, usize)> = (0..params.iterations)
        .into_par_iter()
        .map(|round| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            rng.set_stream(round as u64 + 1);
            let mut rest = base.clone();
            let mut sampled = 0;
            for e in base.mask().iter() {
                if rng.gen_bool(p) {
                    rest.remove(e);
                    sampled += 1;
                }
            }
            Ok((inner.build(&rest)?.into_mask(), sampled))
        })
        .collect::<Result<_>>()?;
    let mut h = g.empty_subgraph();
    let mut sampled_failures = Vec::with_capacity(rounds.len());
    for (mask, sampled) in &rounds {
        h.union_with(mask);
        sampled_failures.push(*sampled);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(0);
    let mut anchors = rand::seq::index::sample(&mut rng, n, anchor_count).into_vec();
    anchors.sort_unstable();
    let budget = params.k + params.r;
    let opts = BuildOptions::unverified();
    let trees: Vec<EdgeMask> = anchors
        .par_iter()
        .flat_map_iter(|&w| [(w, Direction::Out), (w, Direction::In)])
        .map(|(w, dir)| prune_anchored(base, w, dir, budget, &opts).map(Subgraph::into_mask))
        .collect::<Result<_>>()?;
    for mask in &trees {
        h.union_with(mask);
    }
    let sampling = Sampling {
        seed: params.seed,
        k: params.k,
        r: params.r,
        alpha: params.alpha,
        iterations: params.iterations,
        edge_sample_prob: p,
        anchor_count,
        sampled_failures,
        anchors,
    };
    Ok((h, sampling))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KftOptions {
    pub constants: Constants,
    /// Overrides `alpha = 1 / k`.
    pub alpha: Option<f64>,
    pub max_retries: usize,
    pub build: BuildOptions,
}

impl Default for KftOptions {
    fn default() -> Self {
        KftOptions {
            constants: Constants::DESK,
            alpha: None,
            max_retries: 8,
            build: BuildOptions::default(),
        }
    }
}

/// Seed of attempt `attempt` (attempt 0 uses `seed` itself).
pub fn derive_seed(seed: u64, attempt: usize) -> u64 {
    if attempt == 0 {
        return seed;
    }
    let mut z = seed ^ (attempt as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn build_kft_scc(g: &DiGraph, k: usize, seed: u64) -> Result<Preserver<'_>> {
    build_kft_scc_with(g, k, seed, &KftOptions::default())
}

/// k-FT-SCC preserver: the single-failure construction for `k = 1`, else
/// Procedure B over it with `r = 1` and verify-and-retry. After
/// `max_retries` failed attempts every vertex becomes an anchor, which is
/// always correct.
pub fn build_kft_scc_with<'g>(g: &'g DiGraph, k: usize, seed: u64, opts: &KftOptions) -> Result<Preserver<'g>> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if k == 1 {
        return build_1ft_scc_with(g, false, &opts.build);
    }
    let alpha = opts.alpha.unwrap_or(1.0 / k as f64);
    let params_for = |attempt: usize| {
        ProcedureBParams::with_defaults(g.n(), k - 1, 1, alpha, opts.constants, derive_seed(seed, attempt))
    };
    let base = g.full();
    let wrap = |h: Subgraph<'g>, sampling: Sampling, retries: usize, fallback: bool, certification| Preserver {
        subgraph: h,
        provenance: Provenance::KftScc {
            k,
            seed,
            retries,
            fallback_all_anchors: fallback,
            sampling,
        },
        certification,
    };
    if !opts.build.certify {
        let (h, sampling) = procedure_b(&base, &params_for(0), &one_ft_inner)?;
        let c = Certification::Unverified {
            reason: "certification disabled".into(),
        };
        return Ok(wrap(h, sampling, 0, false, c));
    }
    for attempt in 0..=opts.max_retries {
        let (h, sampling) = procedure_b(&base, &params_for(attempt), &one_ft_inner)?;
        match verify_scc_preserver(g, &h, k, &opts.build.verify) {
            Ok(report) if report.passed() => {
                let c = Certification::Verified {
                    failure_sets_checked: report.failure_sets_checked(),
                };
                return Ok(wrap(h, sampling, attempt, false, c));
            }
            Ok(_) => log::info!("k-FT-SCC attempt {attempt} failed verification; retrying"),
            Err(Error::BudgetExceeded { needed, cap }) => {
                log::warn!("{needed} failure sets exceed cap {cap}; preserver left unverified");
                let c = Certification::Unverified {
                    reason: format!("{needed} failure sets exceed cap {cap}"),
                };
                return Ok(wrap(h, sampling, attempt, false, c));
            }
            Err(e) => return Err(e),
        }
    }
    let mut params = params_for(opts.max_retries + 1);
    params.anchor_count = g.n();
    let (h, sampling) = procedure_b(&base, &params, &one_ft_inner)?;
    let c = certify("k-FT-SCC fallback", verify_scc_preserver(g, &h, k, &opts.build.verify))?;
    Ok(wrap(h, sampling, opts.max_retries + 1, true, c))
}

/// Retry count recorded in a k-FT-SCC provenance (0 for other builders).
pub fn retries_of(p: &Preserver<'_>) -> usize {
    match &p.provenance {
        Provenance::KftScc { retries, .. } => *retries,
        _ => 0,
    }
}
