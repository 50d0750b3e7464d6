//! Fixtures shared by the benchmarks.

use ftsparse::random::{gen_random_digraph, random_pairs};
use ftsparse::{DiGraph, PairSet};

/// Strongly connected random graph with `3n` edges.
pub fn sc_graph(n: usize, seed: u64) -> DiGraph {
    gen_random_digraph(n, 3 * n, seed, true).expect("3n edges fit for n >= 4")
}

/// Random graph with `3n` edges and `n / 5` pairs.
pub fn pair_instance(n: usize, seed: u64) -> (DiGraph, PairSet) {
    let g = gen_random_digraph(n, 3 * n, seed, false).expect("3n edges fit for n >= 4");
    let p = random_pairs(n, (n / 5).max(1), seed + 1);
    (g, p)
}
