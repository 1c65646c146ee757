//! Random presentations shared by the property tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use gauge_triple::{parse_graph, GraphPresentation};
use proptest::prelude::*;
use serde_json::json;

pub fn graph_doc(n: usize, edges: &[(usize, usize)], tails: &[usize]) -> String {
    let vs: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let es: Vec<_> = edges
        .iter()
        .enumerate()
        .map(|(i, &(s, r))| json!({"id": format!("e{i}"), "source": vs[s % n], "range": vs[r % n]}))
        .collect();
    let ts: BTreeSet<&String> = tails.iter().map(|&t| &vs[t % n]).collect();
    json!({"k": 1, "vertices": vs, "edges": es, "tails": ts}).to_string()
}

/// Directed graphs on at most six vertices with up to nine edges.
pub fn small_graph() -> impl Strategy<Value = GraphPresentation> {
    (1usize..=6)
        .prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec((0..n, 0..n), 0..=9),
                prop::collection::vec(0..n, 0..=2),
            )
        })
        .prop_filter_map("presentation rejected", |(n, e, t)| parse_graph(&graph_doc(n, &e, &t)).ok())
}

/// Forests: every edge points from a lower to a higher index, so no loop
/// can have an exit and a faithful trace always exists.
pub fn small_forest() -> impl Strategy<Value = GraphPresentation> {
    (2usize..=6)
        .prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec((0..n, 0..n), 1..=8),
                prop::collection::vec(0..n, 0..=2),
            )
        })
        .prop_filter_map("presentation rejected", |(n, e, t)| {
            let edges: Vec<(usize, usize)> =
                e.into_iter().filter(|(a, b)| a != b).map(|(a, b)| (a.min(b), a.max(b))).collect();
            parse_graph(&graph_doc(n, &edges, &t)).ok()
        })
}

/// Renames `v3` to `w3` and so on.
pub fn rename(v: &str) -> String {
    format!("w{}", v.trim_start_matches('v'))
}

/// Out-trees: vertex `i > 0` hangs below a parent with a smaller index.
pub fn small_tree() -> impl Strategy<Value = GraphPresentation> {
    (2usize..=7)
        .prop_flat_map(|n| (Just(n), prop::collection::vec(any::<prop::sample::Index>(), n - 1), prop::collection::vec(0..n, 0..=2)))
        .prop_filter_map("presentation rejected", |(n, parents, t)| {
            let edges: Vec<(usize, usize)> =
                parents.iter().enumerate().map(|(i, p)| (p.index(i + 1), i + 1)).collect();
            parse_graph(&graph_doc(n, &edges, &t)).ok()
        })
}
