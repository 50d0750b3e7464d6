//! Seeded random instances.

use crate::error::{Error, Result};
use crate::graph::{DiGraph, PairSet, Vertex};
use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pair_of(idx: usize, n: usize) -> (Vertex, Vertex) {
    let u = idx / (n - 1);
    let r = idx % (n - 1);
    (u, if r >= u { r + 1 } else { r })
}

fn index_of(u: Vertex, v: Vertex, n: usize) -> usize {
    u * (n - 1) + if v > u { v - 1 } else { v }
}

/// Uniform simple digraph with exactly `m` edges. In strongly connected
/// mode a random Hamiltonian cycle is placed first and the remaining edges
/// are uniform among the other pairs.
pub fn gen_random_digraph(n: usize, m: usize, seed: u64, strongly_connected: bool) -> Result<DiGraph> {
    let slots = n * n.saturating_sub(1);
    let cycle_len = if strongly_connected && n > 1 { n } else { 0 };
    if m > slots || m < cycle_len {
        return Err(Error::InfeasibleEdgeCount { n, m });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if cycle_len == 0 {
        let edges = index::sample(&mut rng, slots, m).into_iter().map(|i| pair_of(i, n));
        return DiGraph::new(n, edges);
    }
    let mut perm: Vec<Vertex> = (0..n).collect();
    perm.shuffle(&mut rng);
    let cycle: Vec<(Vertex, Vertex)> = (0..n).map(|i| (perm[i], perm[(i + 1) % n])).collect();
    let mut taken = vec![false; slots];
    for &(u, v) in &cycle {
        taken[index_of(u, v, n)] = true;
    }
    let free: Vec<usize> = (0..slots).filter(|&i| !taken[i]).collect();
    let extra = index::sample(&mut rng, free.len(), m - n).into_iter().map(|j| pair_of(free[j], n));
    DiGraph::new(n, cycle.into_iter().chain(extra))
}

/// `count` pairs with distinct endpoints drawn uniformly (repeats allowed).
pub fn random_pairs(n: usize, count: usize, seed: u64) -> PairSet {
    if n < 2 {
        return PairSet::default();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| pair_of(rng.gen_range(0..n * (n - 1)), n)).collect()
}
