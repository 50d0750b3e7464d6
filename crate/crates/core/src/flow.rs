//! Small-capacity max-flow by repeated BFS augmentation.

use crate::graph::{EdgeView, Vertex};

pub(crate) struct FlowNetwork {
    head: Vec<usize>,
    residual: Vec<u32>,
    capacity: Vec<u32>,
    adj: Vec<Vec<usize>>,
}

impl FlowNetwork {
    pub(crate) fn new(n: usize) -> Self {
        FlowNetwork {
            head: Vec::new(),
            residual: Vec::new(),
            capacity: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    /// Unit-capacity network over the live edges of a view; arc `i` is edge
    /// `edges[i]`.
    pub(crate) fn from_view<V: EdgeView>(view: &V) -> Self {
        let g = view.graph();
        let mut net = FlowNetwork::new(g.n());
        for e in 0..g.m() {
            if view.contains(e) {
                let (u, v) = g.edge(e);
                net.add_arc(u, v, 1);
            }
        }
        net
    }

    pub(crate) fn add_arc(&mut self, u: Vertex, v: Vertex, cap: u32) -> usize {
        let id = self.head.len();
        self.head.extend([v, u]);
        self.residual.extend([cap, 0]);
        self.capacity.extend([cap, 0]);
        self.adj[u].push(id);
        self.adj[v].push(id + 1);
        id
    }

    /// Flow currently routed through the arc returned by `add_arc`.
    pub(crate) fn flow(&self, arc: usize) -> u32 {
        self.capacity[arc] - self.residual[arc]
    }

    /// Augments until the flow reaches `limit` or no path remains.
    pub(crate) fn max_flow(&mut self, s: Vertex, t: Vertex, limit: u32) -> u32 {
        if s == t {
            return limit;
        }
        let n = self.adj.len();
        let mut total = 0;
        let mut via = vec![usize::MAX; n];
        let mut queue = Vec::with_capacity(n);
        while total < limit {
            via.iter_mut().for_each(|x| *x = usize::MAX);
            queue.clear();
            queue.push(s);
            let mut seen = vec![false; n];
            seen[s] = true;
            let mut qi = 0;
            while qi < queue.len() && !seen[t] {
                let x = queue[qi];
                qi += 1;
                for &a in &self.adj[x] {
                    let y = self.head[a];
                    if self.residual[a] > 0 && !seen[y] {
                        seen[y] = true;
                        via[y] = a;
                        queue.push(y);
                    }
                }
            }
            if !seen[t] {
                break;
            }
            let mut bottleneck = limit - total;
            let mut y = t;
            while y != s {
                let a = via[y];
                bottleneck = bottleneck.min(self.residual[a]);
                y = self.head[a ^ 1];
            }
            let mut y = t;
            while y != s {
                let a = via[y];
                self.residual[a] -= bottleneck;
                self.residual[a ^ 1] += bottleneck;
                y = self.head[a ^ 1];
            }
            total += bottleneck;
        }
        total
    }
}
