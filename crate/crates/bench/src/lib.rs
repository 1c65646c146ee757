//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use gauge_triple::corpus;
use gauge_triple::spectral::{build_truncation, path_generators, Truncation};
use gauge_triple::trace::{default_end_values, solve_graph_trace};
use gauge_triple::{Element, KGraph};

/// Finite model of a broom with `ends` branches, expanded to `depth`.
pub fn broom_model(ends: usize, depth: usize) -> Arc<KGraph> {
    corpus::graph(&corpus::broom(ends)).expand(depth).expect("broom expands")
}

/// Generators of length at most `max_len`, as elements of `model`.
pub fn generators(model: &Arc<KGraph>, max_len: u32) -> Vec<Element> {
    path_generators(model, max_len)
}

/// Truncation of the broom at `level`, built on a model two steps deeper.
pub fn broom_truncation(ends: usize, level: u32) -> Truncation {
    let p = corpus::graph(&corpus::broom(ends));
    let model = p.expand(level as usize + 2).expect("broom expands");
    let t = solve_graph_trace(&p, &default_end_values(&p)).expect("broom has a trace");
    build_truncation(&t.on_model(&model), level).expect("truncation builds")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        let m = broom_model(2, 3);
        assert!(generators(&m, 2).len() > 4);
        broom_truncation(1, 2);
    }
}
