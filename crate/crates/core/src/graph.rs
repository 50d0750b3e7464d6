//! Directed graphs with stable edge ids, edge masks and filtered views.
//!
//! A [`DiGraph`] is immutable once built. Everything derived from it (pruned
//! preservers, `H - F` failure views, induced prefixes) is expressed as a view
//! over the same parent so edge ids never change.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::ops::Range;

pub type Vertex = usize;
pub type EdgeId = usize;

/// Simple directed graph on vertices `0..n`.
///
/// Edges are kept sorted by `(tail, head)` and an edge's id is its position in
/// that order, so the out-edges of a vertex form a contiguous id range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiGraph {
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
    out_start: Vec<usize>,
    in_start: Vec<usize>,
    in_list: Vec<EdgeId>,
}

impl DiGraph {
    /// Builds a graph, sorting edges into canonical order. Self-loops,
    /// duplicates and out-of-range endpoints are rejected.
    pub fn new<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut edges: Vec<(Vertex, Vertex)> = edges.into_iter().collect();
        for &(u, v) in &edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(w[0].0, w[0].1));
        }
        Ok(Self::from_canonical(n, edges))
    }

    fn from_canonical(n: usize, edges: Vec<(Vertex, Vertex)>) -> Self {
        let mut out_start = vec![0; n + 1];
        let mut in_start = vec![0; n + 1];
        for &(u, v) in &edges {
            out_start[u + 1] += 1;
            in_start[v + 1] += 1;
        }
        for i in 0..n {
            out_start[i + 1] += out_start[i];
            in_start[i + 1] += in_start[i];
        }
        let mut fill = in_start.clone();
        let mut in_list = vec![0; edges.len()];
        for (e, &(_, v)) in edges.iter().enumerate() {
            in_list[fill[v]] = e;
            fill[v] += 1;
        }
        DiGraph {
            n,
            edges,
            out_start,
            in_start,
            in_list,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn edge(&self, e: EdgeId) -> (Vertex, Vertex) {
        self.edges[e]
    }

    #[inline]
    pub fn tail(&self, e: EdgeId) -> Vertex {
        self.edges[e].0
    }

    #[inline]
    pub fn head(&self, e: EdgeId) -> Vertex {
        self.edges[e].1
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    /// Ids of the edges leaving `v`, ascending.
    #[inline]
    pub fn out_edges(&self, v: Vertex) -> Range<EdgeId> {
        self.out_start[v]..self.out_start[v + 1]
    }

    /// Ids of the edges entering `v`, ascending.
    #[inline]
    pub fn in_edges(&self, v: Vertex) -> &[EdgeId] {
        &self.in_list[self.in_start[v]..self.in_start[v + 1]]
    }

    pub fn find_edge(&self, u: Vertex, v: Vertex) -> Option<EdgeId> {
        if u >= self.n {
            return None;
        }
        let range = self.out_edges(u);
        let start = range.start;
        self.edges[range]
            .binary_search_by_key(&v, |&(_, h)| h)
            .ok()
            .map(|i| start + i)
    }

    pub fn full(&self) -> Subgraph<'_> {
        Subgraph {
            parent: self,
            mask: EdgeMask::full(self.m()),
        }
    }

    pub fn empty_subgraph(&self) -> Subgraph<'_> {
        Subgraph {
            parent: self,
            mask: EdgeMask::new(self.m()),
        }
    }

    pub fn check_vertex(&self, v: Vertex) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n })
        }
    }
}

/// Fixed-length bit set over edge ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EdgeMask {
    words: Vec<u64>,
    len: usize,
}

impl EdgeMask {
    pub fn new(len: usize) -> Self {
        EdgeMask {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn full(len: usize) -> Self {
        let mut mask = EdgeMask {
            words: vec![u64::MAX; len.div_ceil(64)],
            len,
        };
        mask.trim();
        mask
    }

    pub fn from_ids<I: IntoIterator<Item = EdgeId>>(len: usize, ids: I) -> Result<Self> {
        let mut mask = EdgeMask::new(len);
        for e in ids {
            if e >= len {
                return Err(Error::EdgeOutOfRange { edge: e, m: len });
            }
            mask.insert(e);
        }
        Ok(mask)
    }

    fn trim(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    #[inline]
    pub fn contains(&self, e: EdgeId) -> bool {
        e < self.len && self.words[e / 64] >> (e % 64) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, e: EdgeId) {
        self.words[e / 64] |= 1 << (e % 64);
    }

    #[inline]
    pub fn remove(&mut self, e: EdgeId) {
        self.words[e / 64] &= !(1 << (e % 64));
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn union_with(&mut self, other: &EdgeMask) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    pub fn is_subset(&self, other: &EdgeMask) -> bool {
        self.len == other.len && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Set bits in ascending order.
    pub fn iter(&self) -> impl DoubleEndedIterator<Item = EdgeId> + '_ {
        (0..self.len).filter(move |&e| self.contains(e))
    }

    pub fn to_vec(&self) -> Vec<EdgeId> {
        self.iter().collect()
    }
}

/// Read access to a set of live edges over a parent graph.
pub trait EdgeView {
    fn graph(&self) -> &DiGraph;
    fn contains(&self, e: EdgeId) -> bool;

    /// The view with `removed` edges additionally deleted (`H - F`).
    fn without<'a>(&'a self, removed: &'a [EdgeId]) -> Without<'a, Self>
    where
        Self: Sized,
    {
        Without {
            inner: self,
            removed,
        }
    }

    /// The view restricted to edges with both endpoints in `keep` (`H[A]`).
    fn induced<'a>(&'a self, keep: &'a [bool]) -> Induced<'a, Self>
    where
        Self: Sized,
    {
        Induced { inner: self, keep }
    }

    fn live_edges(&self) -> Vec<EdgeId> {
        (0..self.graph().m()).filter(|&e| self.contains(e)).collect()
    }
}

impl EdgeView for DiGraph {
    fn graph(&self) -> &DiGraph {
        self
    }

    #[inline]
    fn contains(&self, e: EdgeId) -> bool {
        e < self.m()
    }
}

impl<V: EdgeView + ?Sized> EdgeView for &V {
    fn graph(&self) -> &DiGraph {
        (**self).graph()
    }

    #[inline]
    fn contains(&self, e: EdgeId) -> bool {
        (**self).contains(e)
    }
}

pub struct Without<'a, V: ?Sized> {
    inner: &'a V,
    removed: &'a [EdgeId],
}

impl<V: EdgeView + ?Sized> EdgeView for Without<'_, V> {
    fn graph(&self) -> &DiGraph {
        self.inner.graph()
    }

    #[inline]
    fn contains(&self, e: EdgeId) -> bool {
        self.inner.contains(e) && !self.removed.contains(&e)
    }
}

pub struct Induced<'a, V: ?Sized> {
    inner: &'a V,
    keep: &'a [bool],
}

impl<V: EdgeView + ?Sized> EdgeView for Induced<'_, V> {
    fn graph(&self) -> &DiGraph {
        self.inner.graph()
    }

    #[inline]
    fn contains(&self, e: EdgeId) -> bool {
        let (u, v) = self.inner.graph().edge(e);
        self.keep[u] && self.keep[v] && self.inner.contains(e)
    }
}

/// Edge subset of a parent graph; shares the parent's vertex set.
#[derive(Clone, Debug)]
pub struct Subgraph<'g> {
    parent: &'g DiGraph,
    mask: EdgeMask,
}

impl<'g> Subgraph<'g> {
    pub fn new(parent: &'g DiGraph, mask: EdgeMask) -> Result<Self> {
        if mask.len() != parent.m() {
            return Err(Error::NotSubgraph);
        }
        Ok(Subgraph { parent, mask })
    }

    pub fn from_edges<I: IntoIterator<Item = EdgeId>>(parent: &'g DiGraph, ids: I) -> Result<Self> {
        Ok(Subgraph {
            parent,
            mask: EdgeMask::from_ids(parent.m(), ids)?,
        })
    }

    /// Every edge of the view, materialized as a mask over the same parent.
    pub fn of_view<V: EdgeView>(view: &V) -> Subgraph<'_> {
        let g = view.graph();
        let mut mask = EdgeMask::new(g.m());
        for e in 0..g.m() {
            if view.contains(e) {
                mask.insert(e);
            }
        }
        Subgraph { parent: g, mask }
    }

    pub fn parent(&self) -> &'g DiGraph {
        self.parent
    }

    pub fn mask(&self) -> &EdgeMask {
        &self.mask
    }

    pub fn into_mask(self) -> EdgeMask {
        self.mask
    }

    pub fn edge_count(&self) -> usize {
        self.mask.count()
    }

    pub fn edge_ids(&self) -> Vec<EdgeId> {
        self.mask.to_vec()
    }

    pub fn insert(&mut self, e: EdgeId) {
        self.mask.insert(e);
    }

    pub fn remove(&mut self, e: EdgeId) {
        self.mask.remove(e);
    }

    pub fn union_with(&mut self, other: &EdgeMask) {
        self.mask.union_with(other);
    }

    pub fn with_removed(&self, e: EdgeId) -> Subgraph<'g> {
        let mut out = self.clone();
        out.mask.remove(e);
        out
    }

    /// True when this view uses the same parent graph as `g`.
    pub fn is_over(&self, g: &DiGraph) -> bool {
        std::ptr::eq(self.parent, g) || self.parent == g
    }

    pub fn is_subset_of(&self, other: &Subgraph<'_>) -> bool {
        self.mask.is_subset(&other.mask)
    }
}

impl EdgeView for Subgraph<'_> {
    fn graph(&self) -> &DiGraph {
        self.parent
    }

    #[inline]
    fn contains(&self, e: EdgeId) -> bool {
        self.mask.contains(e)
    }
}

/// Ordered collection of `(source, target)` pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairSet(Vec<(Vertex, Vertex)>);

impl PairSet {
    pub fn new(pairs: Vec<(Vertex, Vertex)>) -> Self {
        PairSet(pairs)
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        for &(s, t) in &self.0 {
            for x in [s, t] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
        }
        Ok(())
    }

    /// `{w} x V`.
    pub fn from_source(w: Vertex, n: usize) -> Self {
        PairSet((0..n).map(|v| (w, v)).collect())
    }

    /// `V x {w}`.
    pub fn to_target(w: Vertex, n: usize) -> Self {
        PairSet((0..n).map(|v| (v, w)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, (Vertex, Vertex)> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[(Vertex, Vertex)] {
        &self.0
    }
}

impl FromIterator<(Vertex, Vertex)> for PairSet {
    fn from_iter<I: IntoIterator<Item = (Vertex, Vertex)>>(iter: I) -> Self {
        PairSet(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a PairSet {
    type Item = &'a (Vertex, Vertex);
    type IntoIter = std::slice::Iter<'a, (Vertex, Vertex)>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}
