use gauge_triple::corpus;
use gauge_triple::kgraph::{permutations, Direction};
use gauge_triple::{KGraph, KPath};

fn corpora() -> Vec<(&'static str, String)> {
    vec![
        ("torus-2", corpus::torus(2)),
        ("two-vertex", corpus::two_vertex()),
        ("ef-ab", corpus::ef_ab()),
        ("torus-3", corpus::torus(3)),
        ("torus-4", corpus::torus(4)),
    ]
}

/// Every degree vector in `[0, max]^k`.
fn box_degrees(k: usize, max: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|d| (0..=max).map(move |x| [d.clone(), vec![x]].concat()))
            .collect();
    }
    out
}

fn paths_up_to(g: &KGraph, max: i64) -> Vec<KPath> {
    let mut out = Vec::new();
    for v in g.vertex_ids() {
        for n in box_degrees(g.rank(), max) {
            out.extend(g.enumerate_paths(&n, v, Direction::OutOf));
        }
    }
    out
}

fn colors(g: &KGraph, edges: &[gauge_triple::kgraph::EdgeId]) -> Vec<usize> {
    let mut c: Vec<usize> = edges.iter().map(|&e| g.color(e)).collect();
    c.sort();
    c
}

#[test]
fn segments_recompose() {
    for (name, text) in corpora().into_iter().take(4) {
        let g = corpus::kgraph(&text).graph;
        let paths = paths_up_to(&g, 2);
        assert!(!paths.is_empty(), "{name}");
        for p in &paths {
            let zero = g.zero_degree();
            for m in box_degrees(g.rank(), 2).into_iter().filter(|m| m.iter().zip(&p.degree).all(|(a, b)| a <= b)) {
                let head = g.segment(p, &zero, &m).unwrap();
                let tail = g.segment(p, &m, &p.degree).unwrap();
                assert_eq!(g.compose(&head, &tail).as_ref(), Some(p), "{name}: {p:?} split at {m:?}");
            }
        }
    }
}

#[test]
fn factorizations_recompose_for_every_permutation() {
    for (name, text) in corpora() {
        let g = corpus::kgraph(&text).graph;
        let k = g.rank();
        let ones = vec![1; k];
        for v in g.vertex_ids() {
            for mu in g.enumerate_paths(&ones, v, Direction::OutOf) {
                for sigma in permutations(k) {
                    let edges = g.factorize(&mu, &sigma).unwrap();
                    let seq: Vec<usize> = edges.iter().map(|&e| g.color(e)).collect();
                    assert_eq!(seq, sigma, "{name}: colors out of order");
                    assert_eq!(g.path_from_edges(&edges).as_ref(), Some(&mu), "{name}: {sigma:?}");
                }
            }
        }
    }
}

#[test]
fn degrees_add_and_colors_survive_square_moves() {
    for (name, text) in corpora().into_iter().take(4) {
        let g = corpus::kgraph(&text).graph;
        let paths = paths_up_to(&g, 1);
        for a in &paths {
            for b in paths.iter().filter(|b| b.source == a.range) {
                let ab = g.compose(a, b).unwrap();
                let sum: Vec<i64> = a.degree.iter().zip(&b.degree).map(|(x, y)| x + y).collect();
                assert_eq!(ab.degree, sum, "{name}");
                let joined = [a.edges.clone(), b.edges.clone()].concat();
                assert_eq!(colors(&g, &ab.edges), colors(&g, &joined), "{name}");
            }
        }
    }
}

#[test]
fn mismatched_composition_is_none() {
    let g = corpus::kgraph(&corpus::two_vertex()).graph;
    let x = g.edge_path(g.edge("x").unwrap());
    assert!(g.compose(&x, &x).is_none());
}
