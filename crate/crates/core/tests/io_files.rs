use ftsparse::io::{format_graph, format_pairs, format_subgraph, read_graph, read_pairs, read_subgraph};
use ftsparse::random::{gen_random_digraph, random_pairs};
use ftsparse::scc::build_1ft_scc;
use std::fs;

#[test]
fn files_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..10 {
        let g = gen_random_digraph(12, 30, seed, seed % 2 == 0).unwrap();
        let pairs = random_pairs(12, 5, seed);
        let gp = dir.path().join(format!("g{seed}.txt"));
        let pp = dir.path().join(format!("p{seed}.txt"));
        fs::write(&gp, format_graph(&g)).unwrap();
        fs::write(&pp, format_pairs(&pairs)).unwrap();
        let g2 = read_graph(&gp).unwrap();
        assert_eq!(g2, g);
        assert_eq!(read_pairs(&pp, g2.n()).unwrap(), pairs);

        let h = build_1ft_scc(&g2).unwrap();
        let hp = dir.path().join(format!("h{seed}.txt"));
        fs::write(&hp, format_subgraph(&h.subgraph)).unwrap();
        assert_eq!(read_subgraph(&hp, &g2).unwrap().edge_ids(), h.edge_ids());
    }
}

#[test]
fn missing_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let err = read_graph(dir.path().join("absent.txt")).unwrap_err();
    assert!(matches!(err, ftsparse::Error::Io(_)));
}

#[test]
fn subgraph_against_wrong_parent() {
    let dir = tempfile::tempdir().unwrap();
    let g = gen_random_digraph(6, 12, 3, true).unwrap();
    let other = gen_random_digraph(7, 12, 3, true).unwrap();
    let path = dir.path().join("h.txt");
    fs::write(&path, format_subgraph(&g.full())).unwrap();
    assert!(read_subgraph(&path, &other).is_err());
}
