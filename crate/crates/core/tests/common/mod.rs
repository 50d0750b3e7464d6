//! Reference oracles built from definitions, independent of the library's
//! search and flow code.
#![allow(dead_code)]

use ftsparse::{DiGraph, EdgeId, Vertex};
use itertools::Itertools;

/// Transitive closure over the edges for which `alive` holds.
pub fn closure(g: &DiGraph, alive: impl Fn(EdgeId) -> bool) -> Vec<Vec<bool>> {
    let n = g.n();
    let mut r = vec![vec![false; n]; n];
    for (v, row) in r.iter_mut().enumerate() {
        row[v] = true;
    }
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        if alive(e) {
            r[u][v] = true;
        }
    }
    for w in 0..n {
        for u in 0..n {
            if r[u][w] {
                for v in 0..n {
                    if r[w][v] {
                        r[u][v] = true;
                    }
                }
            }
        }
    }
    r
}

/// Component label per vertex: the smallest mutually reachable vertex.
pub fn scc_labels(g: &DiGraph, alive: impl Fn(EdgeId) -> bool) -> Vec<Vertex> {
    let r = closure(g, alive);
    (0..g.n())
        .map(|u| (0..g.n()).find(|&v| r[u][v] && r[v][u]).unwrap())
        .collect()
}

/// All failure sets of size at most `k` over `0..m`.
pub fn failure_sets(m: usize, k: usize) -> impl Iterator<Item = Vec<EdgeId>> {
    (0..=k.min(m)).flat_map(move |j| (0..m).combinations(j))
}

pub fn scc_preserved(g: &DiGraph, h: &[EdgeId], k: usize) -> bool {
    let mut in_h = vec![false; g.m()];
    for &e in h {
        in_h[e] = true;
    }
    failure_sets(g.m(), k).all(|f| {
        scc_labels(g, |e| !f.contains(&e)) == scc_labels(g, |e| in_h[e] && !f.contains(&e))
    })
}

pub fn ftrs_preserved(g: &DiGraph, h: &[EdgeId], pairs: &[(Vertex, Vertex)], k: usize) -> bool {
    let mut in_h = vec![false; g.m()];
    for &e in h {
        in_h[e] = true;
    }
    failure_sets(g.m(), k).all(|f| {
        let rg = closure(g, |e| !f.contains(&e));
        let rh = closure(g, |e| in_h[e] && !f.contains(&e));
        pairs.iter().all(|&(s, t)| rg[s][t] == rh[s][t])
    })
}

pub fn reaches(g: &DiGraph, alive: impl Fn(EdgeId) -> bool, s: Vertex, t: Vertex) -> bool {
    closure(g, alive)[s][t]
}

/// `{e : t reachable from s, but not once e is removed}`, within `alive`.
pub fn cut_edges(g: &DiGraph, alive: &[bool], s: Vertex, t: Vertex) -> Vec<EdgeId> {
    if !reaches(g, |e| alive[e], s, t) {
        return Vec::new();
    }
    (0..g.m())
        .filter(|&e| alive[e] && !reaches(g, |x| alive[x] && x != e, s, t))
        .collect()
}

/// Every simple `s -> t` path inside `alive`, as edge lists.
pub fn simple_paths(g: &DiGraph, alive: &[bool], s: Vertex, t: Vertex) -> Vec<Vec<EdgeId>> {
    fn go(
        g: &DiGraph,
        alive: &[bool],
        v: Vertex,
        t: Vertex,
        seen: &mut Vec<bool>,
        path: &mut Vec<EdgeId>,
        out: &mut Vec<Vec<EdgeId>>,
    ) {
        if v == t {
            out.push(path.clone());
            return;
        }
        for (e, &(u, w)) in g.edges().iter().enumerate() {
            if u == v && alive[e] && !seen[w] {
                seen[w] = true;
                path.push(e);
                go(g, alive, w, t, seen, path, out);
                path.pop();
                seen[w] = false;
            }
        }
    }
    let mut seen = vec![false; g.n()];
    seen[s] = true;
    let mut out = Vec::new();
    go(g, alive, s, t, &mut seen, &mut Vec::new(), &mut out);
    out
}

/// Inclusion-minimal `s -> t` edge cuts of size at most `max` inside `alive`.
pub fn minimal_cuts(g: &DiGraph, alive: &[bool], s: Vertex, t: Vertex, max: usize) -> Vec<Vec<EdgeId>> {
    let live: Vec<EdgeId> = (0..g.m()).filter(|&e| alive[e]).collect();
    let cuts = |c: &[EdgeId]| !reaches(g, |e| alive[e] && !c.contains(&e), s, t);
    (1..=max)
        .flat_map(|j| live.iter().copied().combinations(j))
        .filter(|c| cuts(c) && (0..c.len()).all(|i| {
            let mut sub = c.clone();
            sub.remove(i);
            !cuts(&sub)
        }))
        .collect()
}

/// At least `k` edge-disjoint paths each way: no cut of fewer than `k`
/// edges separates them in either direction.
pub fn k_edge_connected(g: &DiGraph, alive: &[bool], x: Vertex, y: Vertex, k: usize) -> bool {
    let live: Vec<EdgeId> = (0..g.m()).filter(|&e| alive[e]).collect();
    (0..k).all(|j| {
        live.iter().copied().combinations(j).all(|c| {
            let r = closure(g, |e| alive[e] && !c.contains(&e));
            r[x][y] && r[y][x]
        })
    })
}
