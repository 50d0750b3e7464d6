//! Reachability, strongly connected components, cut edges and certificates.

use crate::error::{Error, Result};
use crate::graph::{DiGraph, EdgeId, EdgeView, Vertex};
use serde::Serialize;
use std::ops::Range;

const NO_EDGE: EdgeId = usize::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Follow edges tail to head (reachability from an anchor).
    Out,
    /// Follow edges head to tail (reachability to an anchor, i.e. on `G^R`).
    In,
}

/// Reusable breadth-first search state. Scanning order is ascending edge id,
/// so parent edges and depths are deterministic.
#[derive(Clone, Debug)]
pub struct Bfs {
    mark: Vec<u32>,
    epoch: u32,
    order: Vec<Vertex>,
    parent: Vec<EdgeId>,
    depth: Vec<u32>,
}

impl Bfs {
    pub fn new(n: usize) -> Self {
        Bfs {
            mark: vec![0; n],
            epoch: 0,
            order: Vec::with_capacity(n),
            parent: vec![NO_EDGE; n],
            depth: vec![0; n],
        }
    }

    fn next_epoch(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.epoch = 1;
        }
        self.order.clear();
    }

    /// Runs the search and returns visited vertices in visiting order.
    pub fn run<V: EdgeView>(&mut self, view: &V, sources: &[Vertex], dir: Direction) -> &[Vertex] {
        let g = view.graph();
        debug_assert_eq!(g.n(), self.mark.len());
        self.next_epoch();
        for &s in sources {
            if self.mark[s] != self.epoch {
                self.mark[s] = self.epoch;
                self.parent[s] = NO_EDGE;
                self.depth[s] = 0;
                self.order.push(s);
            }
        }
        let mut head = 0;
        while head < self.order.len() {
            let v = self.order[head];
            head += 1;
            let d = self.depth[v] + 1;
            match dir {
                Direction::Out => {
                    for e in g.out_edges(v) {
                        if view.contains(e) {
                            self.visit(g.head(e), e, d);
                        }
                    }
                }
                Direction::In => {
                    for &e in g.in_edges(v) {
                        if view.contains(e) {
                            self.visit(g.tail(e), e, d);
                        }
                    }
                }
            }
        }
        &self.order
    }

    #[inline]
    fn visit(&mut self, w: Vertex, e: EdgeId, d: u32) {
        if self.mark[w] != self.epoch {
            self.mark[w] = self.epoch;
            self.parent[w] = e;
            self.depth[w] = d;
            self.order.push(w);
        }
    }

    #[inline]
    pub fn reached(&self, v: Vertex) -> bool {
        self.mark[v] == self.epoch
    }

    pub fn reached_count(&self) -> usize {
        self.order.len()
    }

    pub fn visited(&self) -> &[Vertex] {
        &self.order
    }

    pub fn parent_edge(&self, v: Vertex) -> Option<EdgeId> {
        (self.reached(v) && self.parent[v] != NO_EDGE).then_some(self.parent[v])
    }

    pub fn depth(&self, v: Vertex) -> Option<u32> {
        self.reached(v).then_some(self.depth[v])
    }

    /// Tree edges of the last search.
    pub fn tree_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.order.iter().filter_map(|&v| self.parent_edge(v))
    }

    /// Edges of the tree path between the root and `v`, in walking order
    /// (root to `v` for [`Direction::Out`], `v` to root for [`Direction::In`]).
    pub fn path_edges(&self, g: &DiGraph, v: Vertex, dir: Direction) -> Option<Vec<EdgeId>> {
        if !self.reached(v) {
            return None;
        }
        let mut edges = Vec::new();
        let mut x = v;
        while let Some(e) = self.parent_edge(x) {
            edges.push(e);
            x = match dir {
                Direction::Out => g.tail(e),
                Direction::In => g.head(e),
            };
        }
        if dir == Direction::Out {
            edges.reverse();
        }
        Some(edges)
    }
}

/// Vertices reachable from `s`, ascending (includes `s`).
pub fn reachable_from<V: EdgeView>(view: &V, s: Vertex) -> Vec<Vertex> {
    reach_sorted(view, s, Direction::Out)
}

/// Vertices that can reach `s`, ascending; forward search on `G^R`.
pub fn reachable_to<V: EdgeView>(view: &V, s: Vertex) -> Vec<Vertex> {
    reach_sorted(view, s, Direction::In)
}

fn reach_sorted<V: EdgeView>(view: &V, s: Vertex, dir: Direction) -> Vec<Vertex> {
    let mut bfs = Bfs::new(view.graph().n());
    let mut out = bfs.run(view, &[s], dir).to_vec();
    out.sort_unstable();
    out
}

pub fn is_reachable<V: EdgeView>(view: &V, s: Vertex, t: Vertex) -> bool {
    let mut bfs = Bfs::new(view.graph().n());
    bfs.run(view, &[s], Direction::Out);
    bfs.reached(t)
}

/// Strong-connectivity partition with canonical ids: components are numbered
/// in order of their smallest vertex and each component lists its vertices
/// ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SccPartition {
    component_of: Vec<usize>,
    components: Vec<Vec<Vertex>>,
}

impl SccPartition {
    /// Canonicalizes arbitrary labels (equal label = same component).
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut remap = vec![usize::MAX; labels.len().max(1)];
        let mut component_of = vec![0; labels.len()];
        let mut components: Vec<Vec<Vertex>> = Vec::new();
        for (v, &raw) in labels.iter().enumerate() {
            if raw >= remap.len() {
                remap.resize(raw + 1, usize::MAX);
            }
            if remap[raw] == usize::MAX {
                remap[raw] = components.len();
                components.push(Vec::new());
            }
            component_of[v] = remap[raw];
            components[remap[raw]].push(v);
        }
        SccPartition {
            component_of,
            components,
        }
    }

    pub fn component_of(&self, v: Vertex) -> usize {
        self.component_of[v]
    }

    pub fn components(&self) -> &[Vec<Vertex>] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn same_component(&self, u: Vertex, v: Vertex) -> bool {
        self.component_of[u] == self.component_of[v]
    }
}

pub(crate) trait Successors {
    fn node_count(&self) -> usize;
    fn slots(&self, v: Vertex) -> Range<usize>;
    fn target(&self, v: Vertex, slot: usize) -> Option<Vertex>;
}

struct ViewSuccessors<'a, V>(&'a V);

impl<V: EdgeView> Successors for ViewSuccessors<'_, V> {
    fn node_count(&self) -> usize {
        self.0.graph().n()
    }

    fn slots(&self, v: Vertex) -> Range<usize> {
        self.0.graph().out_edges(v)
    }

    #[inline]
    fn target(&self, _v: Vertex, slot: usize) -> Option<Vertex> {
        self.0.contains(slot).then(|| self.0.graph().head(slot))
    }
}

/// Compressed adjacency for auxiliary graphs (residual networks).
pub(crate) struct Csr {
    start: Vec<usize>,
    adj: Vec<Vertex>,
}

impl Csr {
    pub(crate) fn from_arcs(n: usize, arcs: &[(Vertex, Vertex)]) -> Self {
        let mut start = vec![0; n + 1];
        for &(u, _) in arcs {
            start[u + 1] += 1;
        }
        for i in 0..n {
            start[i + 1] += start[i];
        }
        let mut fill = start.clone();
        let mut adj = vec![0; arcs.len()];
        for &(u, v) in arcs {
            adj[fill[u]] = v;
            fill[u] += 1;
        }
        Csr { start, adj }
    }
}

impl Successors for Csr {
    fn node_count(&self) -> usize {
        self.start.len() - 1
    }

    fn slots(&self, v: Vertex) -> Range<usize> {
        self.start[v]..self.start[v + 1]
    }

    #[inline]
    fn target(&self, _v: Vertex, slot: usize) -> Option<Vertex> {
        Some(self.adj[slot])
    }
}

/// Iterative Tarjan; returns a raw component label per vertex.
pub(crate) fn tarjan<S: Successors>(succ: &S) -> Vec<usize> {
    const UNSEEN: usize = usize::MAX;
    let n = succ.node_count();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack: Vec<Vertex> = Vec::new();
    let mut frames: Vec<(Vertex, Range<usize>)> = Vec::new();
    let mut counter = 0;
    let mut next_comp = 0;

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        frames.push((root, succ.slots(root)));

        while let Some((v, cursor)) = frames.last_mut() {
            let v = *v;
            if let Some(slot) = cursor.next() {
                if let Some(w) = succ.target(v, slot) {
                    if index[w] == UNSEEN {
                        index[w] = counter;
                        low[w] = counter;
                        counter += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        frames.push((w, succ.slots(w)));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                }
                continue;
            }
            frames.pop();
            if low[v] == index[v] {
                while let Some(w) = stack.pop() {
                    on_stack[w] = false;
                    comp[w] = next_comp;
                    if w == v {
                        break;
                    }
                }
                next_comp += 1;
            }
            if let Some((p, _)) = frames.last() {
                low[*p] = low[*p].min(low[v]);
            }
        }
    }
    comp
}

pub fn scc_decompose<V: EdgeView>(view: &V) -> SccPartition {
    SccPartition::from_labels(&tarjan(&ViewSuccessors(view)))
}

/// Edges whose removal alone destroys every `s -> t` path. Empty when `t` is
/// unreachable or `s == t`.
///
/// Computes a flow of value at most two with augmenting paths; when the
/// maximum is one, a saturated edge is a cut edge exactly when its endpoints
/// fall in different strongly connected components of the residual network.
pub fn cut_edges<V: EdgeView>(view: &V, s: Vertex, t: Vertex) -> Vec<EdgeId> {
    let g = view.graph();
    if s == t {
        return Vec::new();
    }
    let mut bfs = Bfs::new(g.n());
    bfs.run(view, &[s], Direction::Out);
    let Some(path) = bfs.path_edges(g, t, Direction::Out) else {
        return Vec::new();
    };
    let mut on_path = vec![false; g.m()];
    for &e in &path {
        on_path[e] = true;
    }
    let arcs: Vec<(Vertex, Vertex)> = (0..g.m())
        .filter(|&e| view.contains(e))
        .map(|e| {
            let (u, v) = g.edge(e);
            if on_path[e] {
                (v, u)
            } else {
                (u, v)
            }
        })
        .collect();
    let residual = Csr::from_arcs(g.n(), &arcs);
    if csr_reaches(&residual, s, t) {
        return Vec::new();
    }
    let comp = tarjan(&residual);
    let mut cut: Vec<EdgeId> = path
        .into_iter()
        .filter(|&e| {
            let (u, v) = g.edge(e);
            comp[u] != comp[v]
        })
        .collect();
    cut.sort_unstable();
    cut
}

fn csr_reaches(csr: &Csr, s: Vertex, t: Vertex) -> bool {
    let mut seen = vec![false; csr.node_count()];
    let mut stack = vec![s];
    seen[s] = true;
    while let Some(v) = stack.pop() {
        if v == t {
            return true;
        }
        for slot in csr.slots(v) {
            let w = csr.adj[slot];
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    false
}

/// Out-tree plus in-tree rooted at the smallest vertex of `component`,
/// spanning it inside the induced view. At most `2(|C| - 1)` edges.
pub fn certificate<V: EdgeView>(component: &[Vertex], view: &V) -> Result<Vec<EdgeId>> {
    let g = view.graph();
    let Some(&root) = component.iter().min() else {
        return Err(Error::InvalidParameter("empty component".into()));
    };
    let mut keep = vec![false; g.n()];
    for &v in component {
        g.check_vertex(v)?;
        keep[v] = true;
    }
    let inside = view.induced(&keep);
    let mut bfs = Bfs::new(g.n());
    let mut edges = Vec::with_capacity(2 * component.len());
    for dir in [Direction::Out, Direction::In] {
        bfs.run(&inside, &[root], dir);
        if component.iter().any(|&v| !bfs.reached(v)) {
            return Err(Error::NotStronglyConnected);
        }
        edges.extend(bfs.tree_edges());
    }
    edges.sort_unstable();
    edges.dedup();
    Ok(edges)
}
