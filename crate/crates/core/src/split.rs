//! Vertex splitting: reduces vertex failures to edge failures.

use crate::graph::{DiGraph, EdgeId, EdgeMask, Subgraph, Vertex};

/// Result of splitting a graph. Every non-protected vertex `v` becomes
/// `v_in -> v_out`; protected vertices keep a single copy (for them
/// `in_vertex == out_vertex` and there is no gadget edge).
#[derive(Clone, Debug)]
pub struct SplitGraph {
    pub graph: DiGraph,
    pub in_vertex: Vec<Vertex>,
    pub out_vertex: Vec<Vertex>,
    /// Original edge id -> split edge id.
    pub edge_map: Vec<EdgeId>,
    /// Gadget edge `(v_in, v_out)` per original vertex.
    pub gadget: Vec<Option<EdgeId>>,
    /// Split vertex -> original vertex.
    pub origin: Vec<Vertex>,
}

pub fn split_vertices(g: &DiGraph, protected: &[Vertex]) -> SplitGraph {
    let n = g.n();
    let mut is_protected = vec![false; n];
    for &v in protected {
        is_protected[v] = true;
    }
    let mut in_vertex = Vec::with_capacity(n);
    let mut out_vertex = Vec::with_capacity(n);
    let mut origin = Vec::with_capacity(2 * n);
    for v in 0..n {
        let vin = origin.len();
        origin.push(v);
        let vout = if is_protected[v] {
            vin
        } else {
            origin.push(v);
            vin + 1
        };
        in_vertex.push(vin);
        out_vertex.push(vout);
    }
    let mut edges: Vec<(Vertex, Vertex)> = g
        .edges()
        .iter()
        .map(|&(u, v)| (out_vertex[u], in_vertex[v]))
        .collect();
    edges.extend((0..n).filter(|&v| !is_protected[v]).map(|v| (in_vertex[v], out_vertex[v])));
    let graph = DiGraph::new(origin.len(), edges).expect("split of a simple graph is simple");
    let edge_map = g
        .edges()
        .iter()
        .map(|&(u, v)| graph.find_edge(out_vertex[u], in_vertex[v]).unwrap())
        .collect();
    let gadget = (0..n)
        .map(|v| (!is_protected[v]).then(|| graph.find_edge(in_vertex[v], out_vertex[v]).unwrap()))
        .collect();
    SplitGraph {
        graph,
        in_vertex,
        out_vertex,
        edge_map,
        gadget,
        origin,
    }
}

impl SplitGraph {
    /// Gadget edges of the given original vertices (protected ones skipped).
    pub fn gadget_edges(&self, vertices: &[Vertex]) -> Vec<EdgeId> {
        vertices.iter().filter_map(|&v| self.gadget[v]).collect()
    }

    /// Image of a subgraph of the original graph: its mapped edges plus all
    /// gadget edges.
    pub fn lift<'s>(&'s self, h: &Subgraph<'_>) -> Subgraph<'s> {
        let mut mask = EdgeMask::new(self.graph.m());
        for e in h.mask().iter() {
            mask.insert(self.edge_map[e]);
        }
        for e in self.gadget.iter().flatten() {
            mask.insert(*e);
        }
        Subgraph::new(&self.graph, mask).expect("mask sized to split graph")
    }
}
