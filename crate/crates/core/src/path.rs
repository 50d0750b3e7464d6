use crate::error::{Error, Result};
use crate::graph::{DiGraph, EdgeId, Vertex};

/// `P ∘ Q`: joins two vertex sequences sharing the junction vertex.
pub fn concat_paths(p: &[Vertex], q: &[Vertex]) -> Result<Vec<Vertex>> {
    let (Some(&end), Some(&start)) = (p.last(), q.first()) else {
        return Err(Error::EmptyPath);
    };
    if end != start {
        return Err(Error::PathMismatch {
            left_end: end,
            right_start: start,
        });
    }
    let mut out = Vec::with_capacity(p.len() + q.len() - 1);
    out.extend_from_slice(p);
    out.extend_from_slice(&q[1..]);
    Ok(out)
}

/// Edge ids along a vertex sequence, or `None` if some step is not an edge.
pub fn path_edge_ids(g: &DiGraph, vertices: &[Vertex]) -> Option<Vec<EdgeId>> {
    vertices.windows(2).map(|w| g.find_edge(w[0], w[1])).collect()
}

/// Vertex sequence of a walk given by consecutive edge ids starting at `start`.
pub fn edge_walk_vertices(g: &DiGraph, start: Vertex, edges: &[EdgeId]) -> Vec<Vertex> {
    let mut out = Vec::with_capacity(edges.len() + 1);
    out.push(start);
    out.extend(edges.iter().map(|&e| g.head(e)));
    out
}
