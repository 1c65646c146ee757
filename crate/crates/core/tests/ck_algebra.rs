use std::sync::Arc;

use gauge_triple::algebra::key_degree;
use gauge_triple::corpus;
use gauge_triple::scalar::rat;
use gauge_triple::spectral::path_generators;
use gauge_triple::{Element, GaussianRational, KGraph};
use proptest::prelude::*;

fn models() -> Vec<Arc<KGraph>> {
    vec![
        corpus::graph(&corpus::cycle(2)).expand(3).unwrap(),
        corpus::graph(&corpus::broom(2)).expand(4).unwrap(),
        corpus::graph(&corpus::rose(2)).expand(2).unwrap(),
        corpus::kgraph(&corpus::torus(2)).graph,
        corpus::kgraph(&corpus::two_vertex()).graph,
    ]
}

/// Small models with at most six edges: every triple of generators of
/// length at most three is checked.
#[test]
fn associativity_exhaustive_on_tiny_graphs() {
    let tiny = [
        corpus::graph(&corpus::cycle(1)).expand(3).unwrap(),
        corpus::graph(&corpus::cycle(3)).expand(3).unwrap(),
        corpus::graph(&corpus::broom(1)).expand(2).unwrap(),
        corpus::graph(&corpus::rose(2)).expand(1).unwrap(),
    ];
    for g in &tiny {
        assert!(g.edge_count() <= 6, "{} edges", g.edge_count());
        let gens = path_generators(g, 3);
        for a in &gens {
            for b in &gens {
                let ab = a * b;
                for c in &gens {
                    assert_eq!(&ab * c, a * &(b * c), "({a})({b})({c})");
                }
            }
        }
    }
}

fn combination(gens: &[Element], picks: &[(usize, i64, i64)]) -> Element {
    let mut x = Element::zero(gens[0].graph());
    for &(i, re, im) in picks {
        let c = GaussianRational::new(rat(re, 1), rat(im, 1));
        x = &x + &gens[i % gens.len()].scale(&c);
    }
    x
}

fn picks() -> impl Strategy<Value = Vec<(usize, i64, i64)>> {
    prop::collection::vec((0usize..1000, -3i64..=3, -2i64..=2), 1..=3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_is_associative(m in 0usize..5, a in picks(), b in picks(), c in picks()) {
        let g = &models()[m];
        let gens = path_generators(g, 2);
        let (a, b, c) = (combination(&gens, &a), combination(&gens, &b), combination(&gens, &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    }

    #[test]
    fn adjoint_reverses_products(m in 0usize..5, a in picks(), b in picks()) {
        let g = &models()[m];
        let gens = path_generators(g, 2);
        let (a, b) = (combination(&gens, &a), combination(&gens, &b));
        prop_assert_eq!((&a * &b).adjoint(), &b.adjoint() * &a.adjoint());
        prop_assert_eq!(a.adjoint().adjoint(), a);
    }

    #[test]
    fn degrees_add_under_products(m in 0usize..5, i in 0usize..1000, j in 0usize..1000) {
        let g = &models()[m];
        let gens = path_generators(g, 2);
        let (a, b) = (&gens[i % gens.len()], &gens[j % gens.len()]);
        let da = a.support().into_iter().next().unwrap();
        let db = b.support().into_iter().next().unwrap();
        let sum: Vec<i64> = da.iter().zip(&db).map(|(x, y)| x + y).collect();
        for d in (a * b).support() {
            prop_assert_eq!(&d, &sum);
        }
    }

    #[test]
    fn local_unit_is_a_projection_and_a_unit(m in 0usize..5, a in picks(), b in picks()) {
        let g = &models()[m];
        let gens = path_generators(g, 2);
        let xs = [combination(&gens, &a), combination(&gens, &b)];
        let phi = Element::local_unit(&xs).unwrap();
        prop_assert_eq!(&phi * &phi, phi.clone());
        prop_assert_eq!(phi.adjoint(), phi.clone());
        for x in &xs {
            prop_assert_eq!(&phi * x, x.clone());
            prop_assert_eq!(x * &phi, x.clone());
        }
    }
}

#[test]
fn cuntz_krieger_sum_at_every_emitting_vertex() {
    for g in models() {
        for v in g.vertex_ids().filter(|&v| !g.is_model_sink(v)) {
            for color in 0..g.rank() {
                let out = g.out_edges(v, color);
                if out.is_empty() {
                    continue;
                }
                let mut sum = Element::zero(&g);
                for &e in out {
                    let s = Element::path(&g, &g.edge_path(e));
                    sum = &sum + &(&s * &s.adjoint());
                }
                assert_eq!(sum, Element::vertex(&g, v), "{} color {color}", g.vertex_name(v));
            }
        }
    }
}

#[test]
fn generators_are_homogeneous() {
    for g in models() {
        for x in path_generators(&g, 2) {
            assert_eq!(x.support().len(), 1);
            for (key, _) in x.terms() {
                assert_eq!(vec![key_degree(key)], x.support().into_iter().collect::<Vec<_>>());
            }
        }
    }
}
