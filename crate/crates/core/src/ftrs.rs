//! Fault-tolerant reachability preservers: anchored k-FTRS by pruning and
//! the two pairwise single-failure constructions.

use crate::error::{Error, Result};
use crate::flow::FlowNetwork;
use crate::graph::{DiGraph, EdgeId, EdgeView, PairSet, Subgraph, Vertex};
use crate::preserver::{certify, BuildOptions, Certification, Preserver, Provenance};
use crate::reach::{cut_edges, is_reachable, Bfs, Direction};
use crate::verify::{anchored_branch_count, verify_ftrs, AnchoredCheck};
use rayon::prelude::*;

#[derive(Clone, Debug)]
pub struct AnchoredFtrs<'g> {
    pub anchor: Vertex,
    pub direction: Direction,
    pub k: usize,
    pub edges: Preserver<'g>,
}

/// Pairs covered by an anchored preserver: `{w} x V` or `V x {w}`.
pub fn anchored_pairs(w: Vertex, dir: Direction, n: usize) -> PairSet {
    match dir {
        Direction::Out => PairSet::from_source(w, n),
        Direction::In => PairSet::to_target(w, n),
    }
}

pub fn build_anchored_ftrs(g: &DiGraph, w: Vertex, dir: Direction, k: usize) -> Result<AnchoredFtrs<'_>> {
    build_anchored_ftrs_with(g, w, dir, k, &BuildOptions::default())
}

pub fn build_anchored_ftrs_with<'g>(
    g: &'g DiGraph,
    w: Vertex,
    dir: Direction,
    k: usize,
    opts: &BuildOptions,
) -> Result<AnchoredFtrs<'g>> {
    g.check_vertex(w)?;
    let h = prune_anchored(&g.full(), w, dir, k, opts)?;
    let provenance = Provenance::Anchored {
        anchor: w,
        direction: dir,
        k,
    };
    let certification = if opts.certify {
        let pairs = anchored_pairs(w, dir, g.n());
        certify("anchored ftrs", verify_ftrs(g, &h, &pairs, k, &opts.verify))?
    } else {
        Certification::Unverified {
            reason: "certification disabled".into(),
        }
    };
    Ok(AnchoredFtrs {
        anchor: w,
        direction: dir,
        k,
        edges: Preserver {
            subgraph: h,
            provenance,
            certification,
        },
    })
}

/// Minimal anchored k-FTRS of `base`: drops edges in descending id order
/// while the exact check against `base` still passes.
pub(crate) fn prune_anchored<'g>(
    base: &Subgraph<'g>,
    w: Vertex,
    dir: Direction,
    k: usize,
    opts: &BuildOptions,
) -> Result<Subgraph<'g>> {
    let g = base.parent();
    let needed = anchored_branch_count(g.n(), k);
    if needed > opts.verify.cap as u128 {
        return Err(Error::BudgetExceeded {
            needed,
            cap: opts.verify.cap,
        });
    }
    let mut check = AnchoredCheck::new(g.n());
    let mut h = base.clone();
    for e in base.mask().iter().rev() {
        let trial = h.with_removed(e);
        if check.holds(base, &trial, w, dir, k) {
            h = trial;
        }
    }
    Ok(h)
}

/// Current reachability and cut edges of one pair.
struct PairState {
    reachable: bool,
    cut: Vec<EdgeId>,
}

fn pair_state<V: EdgeView>(view: &V, s: Vertex, t: Vertex) -> PairState {
    PairState {
        reachable: is_reachable(view, s, t),
        cut: cut_edges(view, s, t),
    }
}

/// Minimal single-failure FTRS for a set of pairs, by cut-edge pruning.
pub fn build_pairwise_ftrs_minimal<'g>(g: &'g DiGraph, pairs: &PairSet) -> Result<Preserver<'g>> {
    build_pairwise_ftrs_minimal_with(g, pairs, &BuildOptions::default())
}

pub fn build_pairwise_ftrs_minimal_with<'g>(
    g: &'g DiGraph,
    pairs: &PairSet,
    opts: &BuildOptions,
) -> Result<Preserver<'g>> {
    pairs.validate(g.n())?;
    let h = prune_pairwise(&g.full(), pairs);
    let provenance = Provenance::PairwiseMinimal { pairs: pairs.len() };
    finish_pairwise(g, h, pairs, provenance, opts)
}

fn finish_pairwise<'g>(
    g: &'g DiGraph,
    h: Subgraph<'g>,
    pairs: &PairSet,
    provenance: Provenance,
    opts: &BuildOptions,
) -> Result<Preserver<'g>> {
    let certification = if opts.certify {
        certify("pairwise ftrs", verify_ftrs(g, &h, pairs, 1, &opts.verify))?
    } else {
        Certification::Unverified {
            reason: "certification disabled".into(),
        }
    };
    Ok(Preserver {
        subgraph: h,
        provenance,
        certification,
    })
}

/// Removes `e` from the current `h` iff every pair keeps its reachability
/// and its cut-edge set in `h - e`.
pub(crate) fn prune_pairwise<'g>(base: &Subgraph<'g>, pairs: &PairSet) -> Subgraph<'g> {
    let mut h = base.clone();
    let mut states: Vec<PairState> = pairs.iter().map(|&(s, t)| pair_state(&h, s, t)).collect();
    for e in base.mask().iter().rev() {
        let trial = h.with_removed(e);
        let mut next = Vec::with_capacity(states.len());
        let mut keep_edge = false;
        for (&(s, t), old) in pairs.iter().zip(&states) {
            let new = pair_state(&trial, s, t);
            if new.reachable != old.reachable || new.cut != old.cut {
                keep_edge = true;
                break;
            }
            next.push(new);
        }
        if !keep_edge {
            h = trial;
            states = next;
        }
    }
    h
}

/// Minimal FTRS of one pair together with its two-path decomposition.
#[derive(Clone, Debug)]
pub struct PairFtrs<'g> {
    pub pair: (Vertex, Vertex),
    pub edges: Subgraph<'g>,
    /// `(Q, Q~)` as vertex sequences; `None` when `t` is unreachable or
    /// `s == t`.
    pub paths: Option<(Vec<Vertex>, Vec<Vertex>)>,
}

pub fn build_pair_ftrs(g: &DiGraph, s: Vertex, t: Vertex) -> Result<PairFtrs<'_>> {
    g.check_vertex(s)?;
    g.check_vertex(t)?;
    let pairs = PairSet::new(vec![(s, t)]);
    let edges = prune_pairwise(&g.full(), &pairs);
    let paths = if s != t && is_reachable(g, s, t) {
        Some(decompose_pair_ftrs(&edges, s, t)?)
    } else {
        None
    };
    Ok(PairFtrs {
        pair: (s, t),
        edges,
        paths,
    })
}

/// `(s,t)`-cut vertices of a view: internal vertices whose removal
/// disconnects `t` from `s`.
pub fn cut_vertices<V: EdgeView>(view: &V, s: Vertex, t: Vertex) -> Vec<Vertex> {
    let g = view.graph();
    let mut bfs = Bfs::new(g.n());
    bfs.run(view, &[s], Direction::Out);
    let Some(path) = bfs.path_edges(g, t, Direction::Out) else {
        return Vec::new();
    };
    let mut keep = vec![true; g.n()];
    let mut out = Vec::new();
    for &e in &path[..path.len() - 1] {
        let v = g.head(e);
        keep[v] = false;
        if !is_reachable(&view.induced(&keep), s, t) {
            out.push(v);
        }
        keep[v] = true;
    }
    out.sort_unstable();
    out
}

/// Splits a minimal single-pair FTRS into two simple `s -> t` paths whose
/// edge union is `h_p` and which share only cut edges and cut vertices.
///
/// A flow of value two is routed with capacity two on cut edges and cut
/// vertices and one elsewhere; `Q` follows the lowest-id edge carrying flow
/// at every step and `Q~` takes what is left.
pub fn decompose_pair_ftrs(h_p: &Subgraph<'_>, s: Vertex, t: Vertex) -> Result<(Vec<Vertex>, Vec<Vertex>)> {
    let g = h_p.parent();
    g.check_vertex(s)?;
    g.check_vertex(t)?;
    if s == t || !is_reachable(h_p, s, t) {
        return Err(Error::Unreachable(s, t));
    }
    let cut_e = cut_edges(h_p, s, t);
    let cut_v = cut_vertices(h_p, s, t);
    let mut net = FlowNetwork::new(2 * g.n());
    let (vin, vout) = (|v: Vertex| 2 * v, |v: Vertex| 2 * v + 1);
    for v in 0..g.n() {
        if v != s && v != t {
            let cap = if cut_v.binary_search(&v).is_ok() { 2 } else { 1 };
            net.add_arc(vin(v), vout(v), cap);
        }
    }
    let edges = h_p.edge_ids();
    let arcs: Vec<usize> = edges
        .iter()
        .map(|&e| {
            let (u, v) = g.edge(e);
            let cap = if cut_e.binary_search(&e).is_ok() { 2 } else { 1 };
            net.add_arc(vout(u), vin(v), cap)
        })
        .collect();
    if net.max_flow(vout(s), vin(t), 2) < 2 {
        return Err(Error::NotDecomposable(
            "fewer than two routes under cut capacities".into(),
        ));
    }
    let mut remaining: Vec<u32> = arcs.iter().map(|&a| net.flow(a)).collect();
    let q = walk_flow(g, &edges, &mut remaining, s, t)?;
    let q2 = walk_flow(g, &edges, &mut remaining, s, t)?;

    let mut used = vec![0u8; edges.len()];
    for path in [&q, &q2] {
        for w in path.windows(2) {
            let i = edges.binary_search(&g.find_edge(w[0], w[1]).unwrap()).unwrap();
            used[i] += 1;
        }
    }
    for (i, &u) in used.iter().enumerate() {
        if u == 0 {
            return Err(Error::NotDecomposable(format!(
                "edge {} lies on neither path",
                edges[i]
            )));
        }
        if u == 2 && cut_e.binary_search(&edges[i]).is_err() {
            return Err(Error::NotDecomposable(format!(
                "shared edge {} is not a cut edge",
                edges[i]
            )));
        }
    }
    Ok((q, q2))
}

/// Follows flow from `s` to `t`, lowest edge id first, consuming one unit.
fn walk_flow(
    g: &DiGraph,
    edges: &[EdgeId],
    remaining: &mut [u32],
    s: Vertex,
    t: Vertex,
) -> Result<Vec<Vertex>> {
    let mut path = vec![s];
    let mut seen = vec![false; g.n()];
    seen[s] = true;
    let mut v = s;
    while v != t {
        let next = g.out_edges(v).find_map(|e| {
            let i = edges.binary_search(&e).ok()?;
            (remaining[i] > 0).then_some(i)
        });
        let Some(i) = next else {
            return Err(Error::NotDecomposable(format!("flow stops at vertex {v}")));
        };
        remaining[i] -= 1;
        v = g.head(edges[i]);
        if seen[v] {
            return Err(Error::NotDecomposable(format!("route revisits vertex {v}")));
        }
        seen[v] = true;
        path.push(v);
    }
    Ok(path)
}

/// `(s, t)` pairs with `s != t` and `t` reachable; the rest need no edges.
fn relevant_pairs(g: &DiGraph, pairs: &PairSet) -> Vec<(Vertex, Vertex)> {
    pairs
        .iter()
        .copied()
        .filter(|&(s, t)| s != t && is_reachable(g, s, t))
        .collect()
}

/// Vertices picked by the greedy loop and the largest remaining frequency.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HubSelection {
    pub hubs: Vec<Vertex>,
    pub max_freq: usize,
}

/// Repeatedly takes the smallest vertex lying on more than `sqrt(total)`
/// live paths and deletes every path through it.
pub fn select_hubs(n: usize, paths: &[Vec<Vertex>], total: usize) -> HubSelection {
    let mut alive = vec![true; paths.len()];
    let mut hubs = Vec::new();
    loop {
        let mut freq = vec![0usize; n];
        for (p, _) in paths.iter().zip(&alive).filter(|(_, &a)| a) {
            for &v in p {
                freq[v] += 1;
            }
        }
        let over = (0..n).find(|&v| freq[v] * freq[v] > total);
        match over {
            Some(w) => {
                hubs.push(w);
                for (p, a) in paths.iter().zip(alive.iter_mut()) {
                    if p.contains(&w) {
                        *a = false;
                    }
                }
            }
            None => {
                let max_freq = freq.into_iter().max().unwrap_or(0);
                return HubSelection { hubs, max_freq };
            }
        }
    }
}

/// Greedy single-failure FTRS: anchored preservers at high-frequency hubs
/// plus the surviving two-path decompositions.
pub fn build_pairwise_ftrs_greedy<'g>(g: &'g DiGraph, pairs: &PairSet) -> Result<Preserver<'g>> {
    build_pairwise_ftrs_greedy_with(g, pairs, &BuildOptions::default())
}

pub fn build_pairwise_ftrs_greedy_with<'g>(
    g: &'g DiGraph,
    pairs: &PairSet,
    opts: &BuildOptions,
) -> Result<Preserver<'g>> {
    pairs.validate(g.n())?;
    let relevant = relevant_pairs(g, pairs);
    let decomposed: Vec<(Vec<Vertex>, Vec<Vertex>)> = relevant
        .par_iter()
        .map(|&(s, t)| {
            let pf = build_pair_ftrs(g, s, t)?;
            Ok(pf.paths.expect("relevant pairs are reachable"))
        })
        .collect::<Result<_>>()?;
    let paths: Vec<Vec<Vertex>> = decomposed.into_iter().flat_map(|(q, q2)| [q, q2]).collect();
    let total = pairs.len();
    let selection = select_hubs(g.n(), &paths, total);
    assert!(
        selection.hubs.len() * selection.hubs.len() <= 4 * total,
        "greedy picked {} hubs for {} pairs",
        selection.hubs.len(),
        total
    );
    assert!(selection.max_freq * selection.max_freq <= total);

    let full = g.full();
    let mut h = g.empty_subgraph();
    let inner = BuildOptions::unverified();
    for &w in &selection.hubs {
        for dir in [Direction::Out, Direction::In] {
            h.union_with(prune_anchored(&full, w, dir, 1, &inner)?.mask());
        }
    }
    for p in paths.iter().filter(|p| !p.iter().any(|v| selection.hubs.contains(v))) {
        for w in p.windows(2) {
            h.insert(g.find_edge(w[0], w[1]).expect("path edges come from g"));
        }
    }
    let provenance = Provenance::PairwiseGreedy {
        pairs: total,
        hubs: selection.hubs,
        max_freq: selection.max_freq,
    };
    finish_pairwise(g, h, pairs, provenance, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::{is_minimal, Requirement, VerifyOptions};

    fn graph(n: usize, edges: &[(usize, usize)]) -> DiGraph {
        DiGraph::new(n, edges.iter().copied()).unwrap()
    }

    fn ids(g: &DiGraph, edges: &[(usize, usize)]) -> Vec<EdgeId> {
        let mut v: Vec<EdgeId> = edges.iter().map(|&(u, w)| g.find_edge(u, w).unwrap()).collect();
        v.sort_unstable();
        v
    }

    #[test]
    fn anchored_out_tree_kept_whole() {
        let g = graph(5, &[(0, 1), (0, 2), (1, 3), (1, 4)]);
        let a = build_anchored_ftrs(&g, 0, Direction::Out, 0).unwrap();
        assert_eq!(a.edges.edge_count(), 4);
        assert!(a.edges.is_verified());
    }

    #[test]
    fn anchored_two_disjoint_paths_kept() {
        let g = graph(4, &[(0, 1), (1, 3), (0, 2), (2, 3)]);
        let a = build_anchored_ftrs(&g, 0, Direction::Out, 1).unwrap();
        assert_eq!(a.edges.edge_count(), 4);
    }

    #[test]
    fn anchored_diamond_keeps_chord() {
        // w=0, a=1, b=2, t=3; with w->b failed, b is reached only via a->b.
        let g = graph(4, &[(0, 1), (0, 2), (1, 3), (2, 3), (1, 2)]);
        let a = build_anchored_ftrs(&g, 0, Direction::Out, 1).unwrap();
        assert_eq!(a.edges.edge_count(), 5);
        let pairs = anchored_pairs(0, Direction::Out, 4);
        let without_chord = g.full().with_removed(g.find_edge(1, 2).unwrap());
        let report = verify_ftrs(&g, &without_chord, &pairs, 1, &VerifyOptions::default()).unwrap();
        assert!(!report.passed());
        assert_eq!(report.counterexample().unwrap().failures, vec![g.find_edge(0, 2).unwrap()]);
    }

    #[test]
    fn anchored_in_direction() {
        let g = graph(4, &[(1, 0), (2, 0), (3, 1), (3, 2), (2, 1)]);
        let a = build_anchored_ftrs(&g, 0, Direction::In, 1).unwrap();
        let pairs = anchored_pairs(0, Direction::In, 4);
        let m = is_minimal(&g, &a.edges.subgraph, Requirement::Pairs(&pairs), 1, &VerifyOptions::default()).unwrap();
        assert!(m.minimal);
    }

    #[test]
    fn minimal_examples() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        let p = build_pairwise_ftrs_minimal(&g, &PairSet::default()).unwrap();
        assert_eq!(p.edge_count(), 0);
        let p = build_pairwise_ftrs_minimal(&g, &PairSet::new(vec![(0, 2)])).unwrap();
        assert_eq!(p.edge_count(), 2);

        // three internally disjoint 0 -> 4 paths of lengths 2, 2, 3.
        let g = graph(6, &[(0, 1), (1, 4), (0, 2), (2, 4), (0, 3), (3, 5), (5, 4)]);
        let pairs = PairSet::new(vec![(0, 4)]);
        let p = build_pairwise_ftrs_minimal(&g, &pairs).unwrap();
        assert!(p.is_verified());
        let kept = p.edge_ids();
        let paths = [ids(&g, &[(0, 1), (1, 4)]), ids(&g, &[(0, 2), (2, 4)]), ids(&g, &[(0, 3), (3, 5), (5, 4)])];
        let whole = paths.iter().filter(|path| path.iter().all(|e| kept.contains(e))).count();
        let untouched = paths.iter().filter(|path| path.iter().all(|e| !kept.contains(e))).count();
        assert_eq!((whole, untouched), (2, 1));
        let m = is_minimal(&g, &p.subgraph, Requirement::Pairs(&pairs), 1, &VerifyOptions::default()).unwrap();
        assert!(m.minimal);
    }

    #[test]
    fn decompose_single_path() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        let (q, q2) = decompose_pair_ftrs(&g.full(), 0, 2).unwrap();
        assert_eq!(q, vec![0, 1, 2]);
        assert_eq!(q2, q);
    }

    #[test]
    fn decompose_disjoint_paths() {
        let g = graph(4, &[(0, 1), (1, 3), (0, 2), (2, 3)]);
        let (q, q2) = decompose_pair_ftrs(&g.full(), 0, 3).unwrap();
        assert_eq!(q, vec![0, 1, 3]);
        assert_eq!(q2, vec![0, 2, 3]);
    }

    #[test]
    fn decompose_figure_eight() {
        // two diamonds joined at cut vertex 3.
        let g = graph(7, &[(0, 1), (0, 2), (1, 3), (2, 3), (3, 4), (3, 5), (4, 6), (5, 6)]);
        assert_eq!(cut_vertices(&g, 0, 6), vec![3]);
        let (q, q2) = decompose_pair_ftrs(&g.full(), 0, 6).unwrap();
        assert_eq!(q, vec![0, 1, 3, 4, 6]);
        assert_eq!(q2, vec![0, 2, 3, 5, 6]);
    }

    #[test]
    fn decompose_rejects_non_minimal() {
        let g = graph(5, &[(0, 1), (1, 4), (0, 2), (2, 4), (0, 3), (3, 4)]);
        assert!(matches!(decompose_pair_ftrs(&g.full(), 0, 4), Err(Error::NotDecomposable(_))));
        assert!(matches!(decompose_pair_ftrs(&g.full(), 4, 0), Err(Error::Unreachable(4, 0))));
    }

    #[test]
    fn greedy_single_pair_uses_anchor() {
        let g = graph(4, &[(0, 1), (1, 3), (0, 2), (2, 3)]);
        let p = build_pairwise_ftrs_greedy(&g, &PairSet::new(vec![(0, 3)])).unwrap();
        match &p.provenance {
            Provenance::PairwiseGreedy { hubs, .. } => assert_eq!(hubs, &vec![0]),
            other => panic!("{other:?}"),
        }
        assert!(p.is_verified());
    }

    #[test]
    fn greedy_star_hub() {
        // pairs (i, 9 + i) routed through hub 8 for i in 0..4.
        let mut edges = Vec::new();
        for i in 0..4 {
            edges.push((i, 8));
            edges.push((8, 9 + i));
        }
        let g = graph(13, &edges);
        let pairs: PairSet = (0..4).map(|i| (i, 9 + i)).collect();
        let p = build_pairwise_ftrs_greedy(&g, &pairs).unwrap();
        match &p.provenance {
            Provenance::PairwiseGreedy { hubs, max_freq, .. } => {
                assert!(hubs.contains(&8));
                assert_eq!(*max_freq, 0);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(p.edge_count(), 8);
        assert_eq!(build_pairwise_ftrs_greedy(&g, &PairSet::default()).unwrap().edge_count(), 0);
    }

    #[test]
    fn hub_threshold_is_strict() {
        // one path through 5 with 4 pairs: freq 1, 1 > 2 is false.
        let sel = select_hubs(6, &[vec![0, 5, 1]], 4);
        assert!(sel.hubs.is_empty());
        assert_eq!(sel.max_freq, 1);
        let sel = select_hubs(6, &[vec![0, 5, 1], vec![2, 5, 3], vec![4, 5]], 4);
        assert_eq!(sel.hubs, vec![5]);
    }
}
