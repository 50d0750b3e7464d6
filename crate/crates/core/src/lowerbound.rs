//! Lower-bound instance families and checkers for their forcing properties.

use crate::error::{Error, Result};
use crate::graph::{DiGraph, EdgeId, EdgeView, PairSet, Vertex};
use crate::reach::{cut_edges, is_reachable, Bfs, Direction};
use crate::verify::{is_minimal, Counterexample, Requirement, VerificationReport, VerifyOptions, Witness};
use std::collections::{BTreeSet, HashMap};

/// Perfect binary out-tree of height `k` with leaves `X`, a set `Y`, all
/// edges `X x Y` and `Y x {root}`.
#[derive(Clone, Debug)]
pub struct AppendixInstance {
    pub graph: DiGraph,
    pub k: usize,
    pub root: Vertex,
    pub leaves: Vec<Vertex>,
    pub y: Vec<Vertex>,
}

/// Tree vertices in BFS order (children of `i` are `2i+1`, `2i+2`), then `Y`.
pub fn gen_appendix_a(k: usize, n_y: usize) -> Result<AppendixInstance> {
    if k == 0 || n_y == 0 {
        return Err(Error::InvalidParameter("appendix instance needs k >= 1 and n_y >= 1".into()));
    }
    let tree = (1usize << (k + 1)) - 1;
    let leaves: Vec<Vertex> = ((1 << k) - 1..tree).collect();
    let y: Vec<Vertex> = (tree..tree + n_y).collect();
    let mut edges = Vec::new();
    for i in 0..(1 << k) - 1 {
        edges.push((i, 2 * i + 1));
        edges.push((i, 2 * i + 2));
    }
    for &x in &leaves {
        edges.extend(y.iter().map(|&w| (x, w)));
    }
    edges.extend(y.iter().map(|&w| (w, 0)));
    let graph = DiGraph::new(tree + n_y, edges)?;
    Ok(AppendixInstance {
        graph,
        k,
        root: 0,
        leaves,
        y,
    })
}

/// `2^{k+1} - 2 + 2^k n_y + n_y`.
pub fn appendix_a_edge_count(k: usize, n_y: usize) -> usize {
    (1 << (k + 1)) - 2 + (1 << k) * n_y + n_y
}

/// Certifies that no edge of `g` can be dropped from a k-FT-SCC preserver.
pub fn check_appendix_a_forcing(g: &DiGraph, k: usize, opts: &VerifyOptions) -> Result<VerificationReport> {
    let m = is_minimal(g, &g.full(), Requirement::Scc, k, opts)?;
    Ok(match m.removable_edge {
        None => VerificationReport::pass(m.failure_sets_checked),
        Some(edge) => VerificationReport::fail(
            Counterexample {
                failures: Vec::new(),
                witness: Witness::RemovableEdge { edge },
            },
            m.failure_sets_checked,
        ),
    })
}

/// Undirected base graph (stored bidirected) with pairs joined by unique,
/// equal-length, pairwise edge-disjoint shortest paths covering all edges.
#[derive(Clone, Debug)]
pub struct BasePairInstance {
    pub h: DiGraph,
    pub pairs: PairSet,
    pub common_length: usize,
}

/// `p` vertex-disjoint paths of length `L`; pair `i` joins the ends of path `i`.
pub fn gen_base_disjoint_paths(p: usize, l: usize) -> Result<BasePairInstance> {
    if p == 0 || l == 0 {
        return Err(Error::InvalidParameter("base instance needs p >= 1 and L >= 1".into()));
    }
    let mut edges = Vec::new();
    let mut pairs = Vec::new();
    for i in 0..p {
        let first = i * (l + 1);
        for j in 0..l {
            edges.push((first + j, first + j + 1));
            edges.push((first + j + 1, first + j));
        }
        pairs.push((first, first + l));
    }
    Ok(BasePairInstance {
        h: DiGraph::new(p * (l + 1), edges)?,
        pairs: PairSet::new(pairs),
        common_length: l,
    })
}

fn property_failure(description: String, checked: u64) -> VerificationReport {
    VerificationReport::fail(
        Counterexample {
            failures: Vec::new(),
            witness: Witness::Property { description },
        },
        checked,
    )
}

fn undirected(u: Vertex, v: Vertex) -> (Vertex, Vertex) {
    (u.min(v), u.max(v))
}

/// The unique shortest path of every pair, given the base properties hold.
pub fn base_paths(inst: &BasePairInstance) -> Result<Vec<Vec<Vertex>>> {
    let mut bfs = Bfs::new(inst.h.n());
    inst.pairs
        .iter()
        .map(|&(s, t)| {
            bfs.run(&inst.h, &[s], Direction::Out);
            let edges = bfs
                .path_edges(&inst.h, t, Direction::Out)
                .ok_or(Error::Unreachable(s, t))?;
            Ok(crate::path::edge_walk_vertices(&inst.h, s, &edges))
        })
        .collect()
}

/// Checks unique shortest paths of the common length, pairwise edge
/// disjointness and that the paths cover every edge.
pub fn check_base_properties(inst: &BasePairInstance) -> VerificationReport {
    let h = &inst.h;
    let l = inst.common_length;
    for &(u, v) in h.edges() {
        if h.find_edge(v, u).is_none() {
            return property_failure(format!("edge ({u}, {v}) has no reverse"), 0);
        }
    }
    let mut owner: HashMap<(Vertex, Vertex), usize> = HashMap::new();
    let mut bfs = Bfs::new(h.n());
    let mut checked = 0;
    for (i, &(s, t)) in inst.pairs.iter().enumerate() {
        checked += 1;
        if s == t {
            return property_failure(format!("pair {i} has equal endpoints"), checked);
        }
        bfs.run(h, &[s], Direction::Out);
        match bfs.depth(t) {
            Some(d) if d as usize == l => {}
            Some(d) => {
                return property_failure(format!("pair {i} at distance {d}, expected {l}"), checked);
            }
            None => return property_failure(format!("pair {i} unreachable"), checked),
        }
        // shortest-path counts along BFS layers.
        let mut count = vec![0u64; h.n()];
        count[s] = 1;
        for &v in bfs.visited() {
            for e in h.out_edges(v) {
                let w = h.head(e);
                if bfs.depth(w) == bfs.depth(v).map(|d| d + 1) {
                    count[w] = count[w].saturating_add(count[v]);
                }
            }
        }
        if count[t] != 1 {
            return property_failure(format!("pair {i} has {} shortest paths", count[t]), checked);
        }
        let path = bfs.path_edges(h, t, Direction::Out).expect("t reached");
        for e in path {
            let (u, v) = h.edge(e);
            if let Some(j) = owner.insert(undirected(u, v), i) {
                return property_failure(format!("pairs {j} and {i} share edge {{{u}, {v}}}"), checked);
            }
        }
    }
    for &(u, v) in h.edges() {
        if !owner.contains_key(&undirected(u, v)) {
            return property_failure(format!("edge {{{u}, {v}}} lies on no pair path"), checked);
        }
    }
    VerificationReport::pass(checked)
}

/// Layered dual-failure instance built from a base instance.
#[derive(Clone, Debug)]
pub struct LayeredInstance {
    pub g: DiGraph,
    pub pairs: PairSet,
    pub layers: usize,
    /// `copy[v][i - 1]` is `v_i`, for `i` in `1..=2K`.
    pub copy: Vec<Vec<Vertex>>,
    pub left: Vec<Vec<Vertex>>,
    pub right: Vec<Vec<Vertex>>,
    pub sources: Vec<Vertex>,
    pub sinks: Vec<Vertex>,
}

/// Vertex and edge counts of the layered instance.
pub fn layered_counts(base_vertices: usize, base_edges: usize, pairs: usize, layers: usize) -> (usize, usize) {
    let two_k = 2 * layers;
    let n = 2 * pairs + two_k * base_vertices + 2 * two_k * base_vertices;
    let m = 2 * (two_k - 1) * base_edges + 2 * (two_k - 1) * base_vertices + 2 * two_k * base_vertices + 4 * pairs;
    (n, m)
}

/// Vertex layout: copies, then left chains, then right chains, then one
/// source and sink per pair.
pub fn gen_dual_failure_graph(inst: &BasePairInstance, layers: usize) -> Result<LayeredInstance> {
    if layers == 0 {
        return Err(Error::InvalidParameter("layer count must be at least 1".into()));
    }
    let nh = inst.h.n();
    let two_k = 2 * layers;
    if layers < inst.common_length {
        log::warn!(
            "K = {layers} < L = {}: forced-path windows extend past the chains",
            inst.common_length
        );
    }
    let block = |offset: usize| -> Vec<Vec<Vertex>> {
        (0..nh).map(|v| (0..two_k).map(|i| offset + v * two_k + i).collect()).collect()
    };
    let copy = block(0);
    let left = block(nh * two_k);
    let right = block(2 * nh * two_k);
    let first_terminal = 3 * nh * two_k;
    let p = inst.pairs.len();
    let sources: Vec<Vertex> = (0..p).map(|j| first_terminal + 2 * j).collect();
    let sinks: Vec<Vertex> = (0..p).map(|j| first_terminal + 2 * j + 1).collect();

    let mut edges = Vec::new();
    for &(u, v) in inst.h.edges() {
        // each directed base edge yields the arcs u_i -> v_{i-1}.
        for i in 1..two_k {
            edges.push((copy[u][i], copy[v][i - 1]));
        }
    }
    for v in 0..nh {
        for i in 0..two_k {
            if i + 1 < two_k {
                edges.push((left[v][i], left[v][i + 1]));
                edges.push((right[v][i], right[v][i + 1]));
            }
            edges.push((left[v][i], copy[v][i]));
            edges.push((copy[v][i], right[v][i]));
        }
    }
    for (j, &(x, y)) in inst.pairs.iter().enumerate() {
        edges.push((sources[j], left[x][0]));
        edges.push((sources[j], right[y][0]));
        edges.push((left[x][two_k - 1], sinks[j]));
        edges.push((right[y][two_k - 1], sinks[j]));
    }
    let g = DiGraph::new(first_terminal + 2 * p, edges)?;
    let pairs = PairSet::new(sources.iter().copied().zip(sinks.iter().copied()).collect());
    Ok(LayeredInstance {
        g,
        pairs,
        layers,
        copy,
        left,
        right,
        sources,
        sinks,
    })
}

/// One designated dual failure and the path it forces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForcedQuery {
    pub pair: usize,
    pub i: usize,
    pub failures: Vec<EdgeId>,
    pub path: Vec<Vertex>,
    /// The copy edges of `path`.
    pub forced: Vec<EdgeId>,
}

/// The dual failure for `(pair, i)` and the unique path it leaves. At the
/// chain ends the missing chain edge is replaced by the adjacent terminal
/// edge.
pub fn forced_query(li: &LayeredInstance, base_path: &[Vertex], pair: usize, i: usize) -> Result<ForcedQuery> {
    let g = &li.g;
    let l = base_path.len() - 1;
    let two_k = 2 * li.layers;
    if i == 0 || i + l > two_k {
        return Err(Error::InvalidParameter(format!(
            "window i = {i} with L = {l} does not fit 2K = {two_k}"
        )));
    }
    let (x, y) = (base_path[0], base_path[l]);
    let (s, t) = (li.sources[pair], li.sinks[pair]);
    let edge = |u: Vertex, v: Vertex| g.find_edge(u, v).expect("recipe edge");
    // chain positions are 1-based in the construction.
    let left_cut = if i + l < two_k {
        edge(li.left[x][i + l - 1], li.left[x][i + l])
    } else {
        edge(li.left[x][two_k - 1], t)
    };
    let right_cut = if i > 1 {
        edge(li.right[y][i - 2], li.right[y][i - 1])
    } else {
        edge(s, li.right[y][0])
    };
    let mut path = vec![s];
    path.extend(&li.left[x][..i + l]);
    let mut forced = Vec::with_capacity(l);
    for (j, &b) in base_path.iter().enumerate() {
        let v = li.copy[b][i + l - j - 1];
        if j > 0 {
            forced.push(edge(*path.last().unwrap(), v));
        }
        path.push(v);
    }
    path.extend(&li.right[y][i - 1..]);
    path.push(t);
    let mut failures = vec![left_cut, right_cut];
    failures.sort_unstable();
    Ok(ForcedQuery {
        pair,
        i,
        failures,
        path,
        forced,
    })
}

#[derive(Clone, Debug)]
pub struct ForcedPaths {
    pub report: VerificationReport,
    pub queries: Vec<ForcedQuery>,
    /// Distinct forced copy edges, ascending.
    pub forced_edges: Vec<EdgeId>,
    /// `K L |P|`.
    pub expected: usize,
}

/// For every pair and `i` in `1..=K`, applies the designated dual failure
/// and certifies that `t` stays reachable with every edge of the predicted
/// path an `(s,t)`-cut edge. Needs `K >= L`.
pub fn check_forced_paths(li: &LayeredInstance, inst: &BasePairInstance) -> Result<ForcedPaths> {
    let l = inst.common_length;
    if li.layers < l {
        return Err(Error::InvalidParameter(format!(
            "forced paths need K >= L (K = {}, L = {l})",
            li.layers
        )));
    }
    let paths = base_paths(inst)?;
    let mut queries = Vec::new();
    let mut forced = BTreeSet::new();
    let mut checked = 0;
    for (pair, bp) in paths.iter().enumerate() {
        for i in 1..=li.layers {
            checked += 1;
            let q = forced_query(li, bp, pair, i)?;
            let (s, t) = (li.sources[pair], li.sinks[pair]);
            let view = li.g.without(&q.failures);
            let cx = |description: String| Counterexample {
                failures: q.failures.clone(),
                witness: Witness::Property { description },
            };
            if !is_reachable(&view, s, t) {
                let report = VerificationReport::fail(cx(format!("pair {pair}, i = {i}: t unreachable")), checked);
                return Ok(ForcedPaths {
                    report,
                    queries,
                    forced_edges: forced.into_iter().collect(),
                    expected: li.layers * l * paths.len(),
                });
            }
            let cut = cut_edges(&view, s, t);
            let path_edges = crate::path::path_edge_ids(&li.g, &q.path).expect("predicted path exists");
            if let Some(&e) = path_edges.iter().find(|e| cut.binary_search(e).is_err()) {
                let report = VerificationReport::fail(
                    cx(format!("pair {pair}, i = {i}: path edge {e} is not a cut edge")),
                    checked,
                );
                return Ok(ForcedPaths {
                    report,
                    queries,
                    forced_edges: forced.into_iter().collect(),
                    expected: li.layers * l * paths.len(),
                });
            }
            forced.extend(q.forced.iter().copied());
            queries.push(q);
        }
    }
    let expected = li.layers * l * paths.len();
    let forced_edges: Vec<EdgeId> = forced.into_iter().collect();
    let report = if forced_edges.len() == expected {
        VerificationReport::pass(checked)
    } else {
        property_failure(
            format!("{} distinct forced edges, expected {expected}", forced_edges.len()),
            checked,
        )
    };
    Ok(ForcedPaths {
        report,
        queries,
        forced_edges,
        expected,
    })
}
