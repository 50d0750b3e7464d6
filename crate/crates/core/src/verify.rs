//! Exhaustive failure-enumeration verifiers and connectivity oracles.
//!
//! Every verifier enumerates all failure sets `F ⊆ E(G)` with `|F| <= k`,
//! smallest size first and lexicographically by edge id within a size, and
//! reports the first set on which the subgraph disagrees with the graph.
//! Enumeration refuses to start when the number of sets exceeds the cap.

use crate::error::{Error, Result};
use crate::flow::FlowNetwork;
use crate::graph::{DiGraph, EdgeId, EdgeView, PairSet, Subgraph, Vertex};
use crate::reach::{scc_decompose, Bfs, Direction};
use crate::split::{split_vertices, SplitGraph};
use serde::Serialize;

pub const DEFAULT_ENUMERATION_CAP: u64 = 5_000_000;

/// Environment variable consulted by [`VerifyOptions::from_env`].
pub const CAP_ENV_VAR: &str = "FTSPARSE_ENUM_CAP";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Maximum number of failure sets a single verification may enumerate.
    pub cap: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

impl VerifyOptions {
    pub fn with_cap(cap: u64) -> Self {
        VerifyOptions { cap }
    }

    pub fn from_env() -> Self {
        std::env::var(CAP_ENV_VAR)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .map(VerifyOptions::with_cap)
            .unwrap_or_default()
    }
}

/// `sum_{j <= k} C(m, j)`, saturating.
pub fn failure_set_count(m: usize, k: usize) -> u128 {
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for j in 0..=k.min(m) {
        total = total.saturating_add(binom);
        binom = binom.saturating_mul((m - j) as u128) / (j as u128 + 1);
    }
    total
}

fn check_budget(m: usize, k: usize, opts: &VerifyOptions) -> Result<()> {
    let needed = failure_set_count(m, k);
    if needed > opts.cap as u128 {
        return Err(Error::BudgetExceeded {
            needed,
            cap: opts.cap,
        });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `target` reachable from `source` in `G - F` but not in `H - F`.
    Pair { source: Vertex, target: Vertex },
    /// A component of `G - F` that `H - F` breaks into `pieces`.
    SplitComponent {
        component: Vec<Vertex>,
        pieces: Vec<Vec<Vertex>>,
    },
    /// `x` and `y` are `required`-edge (or vertex) connected both ways in
    /// `G` but not in `H`.
    ConnectivityLoss {
        x: Vertex,
        y: Vertex,
        required: usize,
    },
    /// The edge can be deleted without violating the property.
    RemovableEdge { edge: EdgeId },
    /// Free-form structural violation (generator checkers).
    Property { description: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub failures: Vec<EdgeId>,
    pub witness: Witness,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    passed: bool,
    counterexample: Option<Counterexample>,
    failure_sets_checked: u64,
}

impl VerificationReport {
    pub fn pass(checked: u64) -> Self {
        VerificationReport {
            passed: true,
            counterexample: None,
            failure_sets_checked: checked,
        }
    }

    pub fn fail(counterexample: Counterexample, checked: u64) -> Self {
        VerificationReport {
            passed: false,
            counterexample: Some(counterexample),
            failure_sets_checked: checked,
        }
    }

    pub fn passed(&self) -> bool {
        self.passed
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        self.counterexample.as_ref()
    }

    /// Failure sets enumerated (for connectivity certificates: vertex pairs
    /// examined).
    pub fn failure_sets_checked(&self) -> u64 {
        self.failure_sets_checked
    }
}

/// Enumerates failure sets in order and stops at the first witness.
fn search<P>(m: usize, k: usize, opts: &VerifyOptions, mut witness_for: P) -> Result<VerificationReport>
where
    P: FnMut(&[EdgeId]) -> Option<Witness>,
{
    check_budget(m, k, opts)?;
    let mut checked = 0u64;
    let mut combo: Vec<EdgeId> = Vec::with_capacity(k);
    for size in 0..=k.min(m) {
        combo.clear();
        combo.extend(0..size);
        loop {
            checked += 1;
            if let Some(witness) = witness_for(&combo) {
                let cx = Counterexample {
                    failures: combo.clone(),
                    witness,
                };
                return Ok(VerificationReport::fail(cx, checked));
            }
            if !next_combination(&mut combo, m) {
                break;
            }
        }
    }
    Ok(VerificationReport::pass(checked))
}

/// Advances to the lexicographically next `combo.len()`-subset of `0..m`.
fn next_combination(combo: &mut [usize], m: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < m - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn ensure_over(g: &DiGraph, h: &Subgraph<'_>) -> Result<()> {
    if h.is_over(g) {
        Ok(())
    } else {
        Err(Error::NotSubgraph)
    }
}

/// Pairs grouped by source, keeping pair indices.
struct SourceGroups(Vec<(Vertex, Vec<(usize, Vertex)>)>);

impl SourceGroups {
    fn new(pairs: &PairSet) -> Self {
        let mut groups: Vec<(Vertex, Vec<(usize, Vertex)>)> = Vec::new();
        for (i, &(s, t)) in pairs.iter().enumerate() {
            match groups.iter_mut().find(|(src, _)| *src == s) {
                Some((_, ts)) => ts.push((i, t)),
                None => groups.push((s, vec![(i, t)])),
            }
        }
        SourceGroups(groups)
    }

    /// Smallest pair index reachable in `big` but not in `small`.
    fn first_loss<B: EdgeView, S: EdgeView>(
        &self,
        big: &B,
        small: &S,
        bfs_big: &mut Bfs,
        bfs_small: &mut Bfs,
    ) -> Option<usize> {
        let mut first: Option<usize> = None;
        for (s, targets) in &self.0 {
            bfs_small.run(small, &[*s], Direction::Out);
            if targets.iter().all(|&(_, t)| bfs_small.reached(t)) {
                continue;
            }
            bfs_big.run(big, &[*s], Direction::Out);
            for &(i, t) in targets {
                if bfs_big.reached(t) && !bfs_small.reached(t) && first.is_none_or(|f| i < f) {
                    first = Some(i);
                }
            }
        }
        first
    }
}

/// k-FTRS check: for every `|F| <= k` and every pair, `s -> t` reachability
/// agrees between `g - F` and `h - F`.
pub fn verify_ftrs(
    g: &DiGraph,
    h: &Subgraph<'_>,
    pairs: &PairSet,
    k: usize,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    ensure_over(g, h)?;
    pairs.validate(g.n())?;
    verify_ftrs_within(g, h, pairs, k, opts)
}

/// As [`verify_ftrs`], with an arbitrary base view in place of `g`
/// (failures still range over all parent edges).
pub(crate) fn verify_ftrs_within<B: EdgeView>(
    base: &B,
    h: &Subgraph<'_>,
    pairs: &PairSet,
    k: usize,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let g = base.graph();
    let groups = SourceGroups::new(pairs);
    let mut bfs_g = Bfs::new(g.n());
    let mut bfs_h = Bfs::new(g.n());
    search(g.m(), k, opts, |f| {
        let gf = base.without(f);
        let hf = h.without(f);
        groups
            .first_loss(&gf, &hf, &mut bfs_g, &mut bfs_h)
            .map(|i| {
                let (source, target) = pairs.as_slice()[i];
                Witness::Pair { source, target }
            })
    })
}

/// k-FT-SCC check: the strong-connectivity partitions of `g - F` and
/// `h - F` are identical for every `|F| <= k`.
///
/// Partitions are compared in full, singletons included. Because `h ⊆ g`,
/// the partition of `h - F` always refines that of `g - F`, so comparing only
/// non-singleton components would give the same verdict.
pub fn verify_scc_preserver(
    g: &DiGraph,
    h: &Subgraph<'_>,
    k: usize,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    ensure_over(g, h)?;
    search(g.m(), k, opts, |f| {
        let pg = scc_decompose(&g.without(f));
        let ph = scc_decompose(&h.without(f));
        (pg != ph).then(|| split_witness(&pg, &ph))
    })
}

fn split_witness(pg: &crate::reach::SccPartition, ph: &crate::reach::SccPartition) -> Witness {
    for comp in pg.components() {
        let first = ph.component_of(comp[0]);
        if comp.iter().any(|&v| ph.component_of(v) != first) {
            let mut labels: Vec<usize> = comp.iter().map(|&v| ph.component_of(v)).collect();
            labels.dedup();
            let mut seen = Vec::new();
            for l in labels {
                if !seen.contains(&l) {
                    seen.push(l);
                }
            }
            let pieces = seen.iter().map(|&l| ph.components()[l].clone()).collect();
            return Witness::SplitComponent {
                component: comp.clone(),
                pieces,
            };
        }
    }
    unreachable!("partitions differ but no component of g - F is split")
}

#[derive(Clone, Copy, Debug)]
pub enum Requirement<'a> {
    Pairs(&'a PairSet),
    Scc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Minimality {
    pub minimal: bool,
    /// Smallest-id edge whose removal keeps the property.
    pub removable_edge: Option<EdgeId>,
    pub failure_sets_checked: u64,
}

/// True iff deleting any single edge of `h` breaks verification.
pub fn is_minimal(
    g: &DiGraph,
    h: &Subgraph<'_>,
    requirement: Requirement<'_>,
    k: usize,
    opts: &VerifyOptions,
) -> Result<Minimality> {
    ensure_over(g, h)?;
    check_budget(g.m(), k, opts)?;
    let mut checked = 0;
    for e in h.mask().iter() {
        let trial = h.with_removed(e);
        let report = match requirement {
            Requirement::Pairs(pairs) => verify_ftrs(g, &trial, pairs, k, opts)?,
            Requirement::Scc => verify_scc_preserver(g, &trial, k, opts)?,
        };
        checked += report.failure_sets_checked();
        if report.passed() {
            return Ok(Minimality {
                minimal: false,
                removable_edge: Some(e),
                failure_sets_checked: checked,
            });
        }
    }
    Ok(Minimality {
        minimal: true,
        removable_edge: None,
        failure_sets_checked: checked,
    })
}

/// Maximum number of edge-disjoint `x -> y` paths, capped at `limit`.
pub fn edge_disjoint_paths<V: EdgeView>(view: &V, x: Vertex, y: Vertex, limit: usize) -> usize {
    FlowNetwork::from_view(view).max_flow(x, y, limit as u32) as usize
}

/// At least `k` edge-disjoint paths `x -> y` and at least `k` from `y -> x`.
pub fn k_edge_connected<V: EdgeView>(view: &V, x: Vertex, y: Vertex, k: usize) -> bool {
    debug_assert_ne!(x, y);
    edge_disjoint_paths(view, x, y, k) >= k && edge_disjoint_paths(view, y, x, k) >= k
}

/// At least `k` internally vertex-disjoint paths each way between original
/// vertices `x` and `y`, measured on a view of the split graph.
pub fn k_vertex_connected<V: EdgeView>(
    split: &SplitGraph,
    view: &V,
    x: Vertex,
    y: Vertex,
    k: usize,
) -> bool {
    let flow = |a: Vertex, b: Vertex| {
        FlowNetwork::from_view(view).max_flow(split.out_vertex[a], split.in_vertex[b], k as u32)
            as usize
    };
    flow(x, y) >= k && flow(y, x) >= k
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConnectivityMode {
    Edge,
    Vertex,
}

/// k-connectivity certificate check: every pair that is k-connected both
/// ways in `g` is also k-connected both ways in `h`. Vertex mode measures
/// connectivity on the split graph, with `h` lifted by keeping all gadget
/// edges.
pub fn verify_connectivity_certificate(
    g: &DiGraph,
    h: &Subgraph<'_>,
    k: usize,
    mode: ConnectivityMode,
) -> Result<VerificationReport> {
    ensure_over(g, h)?;
    match mode {
        ConnectivityMode::Edge => Ok(certificate_search(g.n(), k, |x, y| {
            k_edge_connected(g, x, y, k) && !k_edge_connected(h, x, y, k)
        })),
        ConnectivityMode::Vertex => {
            let split = split_vertices(g, &[]);
            let lifted = split.lift(h);
            verify_split_vertex_certificate(&split, &lifted, k)
        }
    }
}

/// Vertex-connectivity certificate check where the candidate is already a
/// subgraph of the split graph (for instance a preserver built on it).
pub fn verify_split_vertex_certificate(
    split: &SplitGraph,
    h: &Subgraph<'_>,
    k: usize,
) -> Result<VerificationReport> {
    ensure_over(&split.graph, h)?;
    let n = split.in_vertex.len();
    Ok(certificate_search(n, k, |x, y| {
        k_vertex_connected(split, &split.graph, x, y, k) && !k_vertex_connected(split, h, x, y, k)
    }))
}

fn certificate_search<F: FnMut(Vertex, Vertex) -> bool>(n: usize, k: usize, mut lost: F) -> VerificationReport {
    let mut checked = 0;
    for x in 0..n {
        for y in x + 1..n {
            checked += 1;
            if lost(x, y) {
                let cx = Counterexample {
                    failures: Vec::new(),
                    witness: Witness::ConnectivityLoss { x, y, required: k },
                };
                return VerificationReport::fail(cx, checked);
            }
        }
    }
    VerificationReport::pass(checked)
}

/// Exact anchored-preserver check by branching on BFS-tree edges.
///
/// A failure set that misses the current BFS tree of `h` cannot shrink the
/// anchor's reach in `h`, and since `h ⊆ base` it cannot make `base` reach
/// more; so only failure sets meeting the tree need exploring. This costs
/// `O(n^k)` searches instead of `O(m^k)`.
pub(crate) struct AnchoredCheck {
    bfs_base: Bfs,
    bfs_h: Bfs,
    failed: Vec<EdgeId>,
}

impl AnchoredCheck {
    pub(crate) fn new(n: usize) -> Self {
        AnchoredCheck {
            bfs_base: Bfs::new(n),
            bfs_h: Bfs::new(n),
            failed: Vec::new(),
        }
    }

    pub(crate) fn holds<B: EdgeView, H: EdgeView>(
        &mut self,
        base: &B,
        h: &H,
        anchor: Vertex,
        dir: Direction,
        k: usize,
    ) -> bool {
        self.failed.clear();
        self.rec(base, h, anchor, dir, k)
    }

    fn rec<B: EdgeView, H: EdgeView>(
        &mut self,
        base: &B,
        h: &H,
        anchor: Vertex,
        dir: Direction,
        budget: usize,
    ) -> bool {
        let failed = std::mem::take(&mut self.failed);
        let reach_h = self.bfs_h.run(&h.without(&failed), &[anchor], dir).len();
        let reach_base = self.bfs_base.run(&base.without(&failed), &[anchor], dir).len();
        self.failed = failed;
        if reach_h != reach_base {
            return false;
        }
        if budget == 0 {
            return true;
        }
        let branch: Vec<EdgeId> = self.bfs_h.tree_edges().collect();
        for e in branch {
            self.failed.push(e);
            let ok = self.rec(base, h, anchor, dir, budget - 1);
            self.failed.pop();
            if !ok {
                return false;
            }
        }
        true
    }
}

/// Upper bound on searches made by one [`AnchoredCheck::holds`] call.
pub(crate) fn anchored_branch_count(n: usize, k: usize) -> u128 {
    let width = n.saturating_sub(1) as u128;
    let mut total: u128 = 0;
    let mut level: u128 = 1;
    for _ in 0..=k {
        total = total.saturating_add(level);
        level = level.saturating_mul(width);
    }
    total
}
