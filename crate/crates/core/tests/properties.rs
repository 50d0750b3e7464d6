mod common;

use ftsparse::ftrs::{anchored_pairs, build_anchored_ftrs};
use ftsparse::random::gen_random_digraph;
use ftsparse::reach::{certificate, cut_edges, scc_decompose};
use ftsparse::scc::{build_1ft_scc, build_h0, build_kft_scc, check_prefix_property, OrderedList};
use ftsparse::split::split_vertices;
use ftsparse::verify::{
    failure_set_count, k_edge_connected, verify_connectivity_certificate, verify_ftrs, verify_scc_preserver,
    ConnectivityMode,
};
use ftsparse::{DiGraph, Direction, EdgeView, Error, Subgraph, VerifyOptions};
use proptest::prelude::*;

fn graph(max_n: usize, density: usize, sc: bool) -> impl Strategy<Value = DiGraph> {
    (2..=max_n, any::<u64>(), 0.0..1.0f64).prop_map(move |(n, seed, frac)| {
        let lo = if sc { n } else { 0 };
        let hi = (density * n).min(n * (n - 1)).max(lo);
        let m = lo + ((hi - lo) as f64 * frac) as usize;
        gen_random_digraph(n, m, seed, sc).unwrap()
    })
}

fn all_edges(g: &DiGraph) -> Vec<usize> {
    (0..g.m()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scc_matches_closure(g in graph(12, 3, false)) {
        let part = scc_decompose(&g);
        let reach = common::closure(&g, |_| true);
        for u in 0..g.n() {
            for v in 0..g.n() {
                prop_assert_eq!(part.same_component(u, v), reach[u][v] && reach[v][u]);
            }
        }
    }

    #[test]
    fn cut_edges_match_definition(g in graph(10, 3, false), s in 0usize..10, t in 0usize..10) {
        let (s, t) = (s % g.n(), t % g.n());
        prop_assume!(s != t);
        let all = vec![true; g.m()];
        let mut got = cut_edges(&g, s, t);
        got.sort_unstable();
        prop_assert_eq!(got, common::cut_edges(&g, &all, s, t));
    }

    #[test]
    fn certificate_spans_component(g in graph(10, 3, false)) {
        for comp in scc_decompose(&g).components() {
            let cert = certificate(comp, &g).unwrap();
            prop_assert!(cert.len() <= 2 * (comp.len() - 1));
            let inside = |e: usize| cert.contains(&e);
            for &e in &cert {
                let (a, b) = g.edge(e);
                prop_assert!(comp.contains(&a) && comp.contains(&b));
            }
            for &v in comp {
                prop_assert!(common::reaches(&g, inside, comp[0], v) && common::reaches(&g, inside, v, comp[0]));
            }
        }
    }

    #[test]
    fn split_preserves_vertex_failures(g in graph(8, 3, false), picks in proptest::collection::vec(0usize..8, 0..3)) {
        let s = split_vertices(&g, &[]);
        let failed: Vec<usize> = picks.iter().map(|&v| v % g.n()).collect();
        let gadgets = s.gadget_edges(&failed);
        let alive_g = |e: usize| {
            let (a, b) = g.edge(e);
            !failed.contains(&a) && !failed.contains(&b)
        };
        for u in 0..g.n() {
            for v in 0..g.n() {
                if u == v || failed.contains(&u) || failed.contains(&v) {
                    continue;
                }
                let direct = common::reaches(&g, alive_g, u, v);
                let split = common::reaches(&s.graph, |e| !gadgets.contains(&e), s.out_vertex[u], s.in_vertex[v]);
                prop_assert_eq!(direct, split);
            }
        }
    }

    #[test]
    fn budget_is_monotone(g in graph(8, 3, true), cap in 1u64..400) {
        let h = build_1ft_scc(&g).unwrap();
        let need = failure_set_count(g.m(), 2);
        let small = verify_scc_preserver(&g, &h.subgraph, 2, &VerifyOptions::with_cap(cap));
        let big = verify_scc_preserver(&g, &h.subgraph, 2, &VerifyOptions::with_cap(cap * 1000));
        if need > cap as u128 {
            let over = matches!(small, Err(Error::BudgetExceeded { .. }));
            prop_assert!(over);
        } else {
            prop_assert_eq!(small.unwrap().passed(), big.unwrap().passed());
        }
    }

    #[test]
    fn builders_are_deterministic(g in graph(9, 3, true), seed in any::<u64>()) {
        let a = build_kft_scc(&g, 2, seed).unwrap();
        let b = build_kft_scc(&g, 2, seed).unwrap();
        prop_assert_eq!(a.edge_ids(), b.edge_ids());
        let c = build_1ft_scc(&g).unwrap();
        let d = build_1ft_scc(&g).unwrap();
        prop_assert_eq!(c.edge_ids(), d.edge_ids());
    }

    #[test]
    fn anchored_matches_exhaustive(g in graph(8, 3, false), w in 0usize..8, k in 1usize..=2, out in any::<bool>()) {
        let w = w % g.n();
        let dir = if out { Direction::Out } else { Direction::In };
        let a = build_anchored_ftrs(&g, w, dir, k).unwrap();
        let pairs = anchored_pairs(w, dir, g.n());
        let raw: Vec<_> = pairs.iter().copied().collect();
        let report = verify_ftrs(&g, &a.edges.subgraph, &pairs, k, &VerifyOptions::default()).unwrap();
        prop_assert!(report.passed());
        prop_assert!(common::ftrs_preserved(&g, &a.edges.edge_ids(), &raw, k));
    }

    #[test]
    fn preserver_is_edge_certificate(g in graph(8, 3, true), k in 2usize..=3) {
        let h = build_kft_scc(&g, k - 1, 7).unwrap();
        let report = verify_connectivity_certificate(&g, &h.subgraph, k, ConnectivityMode::Edge).unwrap();
        prop_assert!(report.passed());
        for x in 0..g.n() {
            for y in 0..g.n() {
                if x != y && k_edge_connected(&g, x, y, k) {
                    prop_assert!(k_edge_connected(&h.subgraph, x, y, k));
                }
            }
        }
    }

    #[test]
    fn sampling_claim(g in graph(8, 3, true), mask in any::<u64>(), f2 in 0usize..64) {
        // J = sampled edges, H~ = 1-FT-SCC preserver of G - J, F = F1 + F2 with F1 inside J.
        let j: Vec<usize> = (0..g.m()).filter(|e| mask >> (e % 64) & 1 == 1).collect();
        let rest: Vec<usize> = (0..g.m()).filter(|e| !j.contains(e)).collect();
        let gj = DiGraph::new(g.n(), rest.iter().map(|&e| g.edge(e))).unwrap();
        let local = build_1ft_scc(&gj).unwrap();
        let h: Vec<usize> = local.edge_ids().into_iter().map(|e| rest[e]).collect();
        let f2 = f2 % (g.m() + 1);
        for f1 in j.iter().map(|&e| vec![e]).chain([vec![]]) {
            let mut f = f1.clone();
            if f2 < g.m() && !f.contains(&f2) {
                f.push(f2);
            }
            let gf = g.without(&f);
            let hf = |e: usize| h.contains(&e) && e != f2;
            let labels = common::scc_labels(&g, hf);
            for comp in scc_decompose(&gf).components() {
                let cert = certificate(comp, &gf).unwrap();
                if cert.iter().any(|e| j.contains(e)) {
                    continue;
                }
                prop_assert!(comp.iter().all(|&v| labels[v] == labels[comp[0]]));
                let outside = (0..g.n()).filter(|v| !comp.contains(v)).all(|v| labels[v] != labels[comp[0]]);
                prop_assert!(outside);
            }
        }
    }

    #[test]
    fn h0_prefix_property(g in graph(30, 3, false), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut order: Vec<usize> = (0..g.n()).collect();
        order.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let order = OrderedList::new(order, g.n()).unwrap();
        let h = build_h0(&g, &order).unwrap();
        prop_assert!(h.edge_count() <= 2 * g.n());
        prop_assert!(check_prefix_property(&g, &h, &order));
        let full = Subgraph::from_edges(&g, all_edges(&g)).unwrap();
        prop_assert!(check_prefix_property(&g, &full, &order));
    }
}
