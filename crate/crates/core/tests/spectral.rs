use gauge_triple::conditions::closedness_tuples;
use gauge_triple::corpus;
use gauge_triple::scalar::rat;
use gauge_triple::spectral::{
    build_dirac, build_truncation, closedness_eval, decompose_projection, graph_model, semifinite_trace,
    singular_profile, whole_masses, Truncation,
};
use gauge_triple::trace::kgraph_trace;
use num_traits::Zero;

fn truncations() -> Vec<(&'static str, Truncation)> {
    let mut out = Vec::new();
    for (name, text) in [("cycle-2", corpus::cycle(2)), ("broom-2", corpus::broom(2)), ("dyadic-1", corpus::dyadic_tree(1))] {
        let (_, t) = graph_model(&corpus::graph(&text), 4).unwrap();
        out.push((name, build_truncation(&t, 2).unwrap()));
    }
    for (name, text) in [("torus-2", corpus::torus(2)), ("two-vertex", corpus::two_vertex())] {
        let t = kgraph_trace(&corpus::kgraph(&text), None).unwrap();
        out.push((name, build_truncation(&t, 2).unwrap()));
    }
    out
}

#[test]
fn generators_act_as_a_star_representation() {
    for (name, tr) in truncations() {
        assert_eq!(tr.verify_orthogonality().unwrap(), None, "{name}");
        let gens = tr.generators(1);
        assert_eq!(tr.verify_star_representation(&gens).unwrap(), None, "{name}");
    }
}

#[test]
fn dirac_is_symmetric() {
    for (name, tr) in truncations() {
        let d = build_dirac(&tr).unwrap();
        assert!(d.is_symmetric(&tr).unwrap(), "{name}");
    }
}

#[test]
fn semifinite_trace_is_tracial_on_decompositions() {
    let p = corpus::graph(&corpus::broom(2));
    let (model, t) = graph_model(&p, 5).unwrap();
    let tr = build_truncation(&t, 3).unwrap();
    let degrees: [&[i64]; 4] = [&[0], &[1], &[-1], &[2]];
    for v in p.vertex_names().iter().map(|n| model.vertex(n).unwrap()) {
        let sums: Vec<_> = degrees.iter().map(|n| decompose_projection(&tr, v, n).unwrap()).collect();
        for a in &sums {
            for b in &sums {
                let ab = semifinite_trace(&a.compose(b).unwrap(), &t).unwrap();
                let ba = semifinite_trace(&b.compose(a).unwrap(), &t).unwrap();
                assert_eq!(ab, ba);
            }
        }
    }
}

#[test]
fn circle_profile_settles() {
    let (_, t) = graph_model(&corpus::graph(&corpus::cycle(1)), 3).unwrap();
    let masses = whole_masses(&build_truncation(&t, 1).unwrap()).unwrap();
    let a = singular_profile(&masses, 1_000_000).unwrap();
    let b = singular_profile(&masses, 2_000_000).unwrap();
    assert!((a.limit - b.limit).abs() / a.limit < 5e-4, "{} vs {}", a.limit, b.limit);
    let from = a.monotone_from.expect("samples settle into a decreasing run");
    let tail: Vec<f64> = a.samples.iter().filter(|(t, _)| *t >= from).map(|s| s.1).collect();
    assert!(tail.len() > 10);
    assert!(tail.windows(2).all(|w| w[1] <= w[0] + 1e-12), "samples rise after the threshold");
    assert!(a.limit > 2.0 && a.limit < 2.01);
}

#[test]
fn closedness_vanishes_on_gauge_invariant_traces() {
    for (name, tr) in truncations() {
        for tuple in closedness_tuples(&tr, 60) {
            let r = closedness_eval(tr.trace(), &tuple).unwrap();
            assert!(r.value.is_zero(), "{name}: {:?}", r.degrees);
        }
    }
}

#[test]
fn vertex_blocks_have_trace_of_the_vertex() {
    let (model, t) = graph_model(&corpus::graph(&corpus::dyadic_tree(2)), 4).unwrap();
    let tr = build_truncation(&t, 2).unwrap();
    let v = model.vertex("t0").unwrap();
    let blocks = gauge_triple::spectral::vertex_block_traces(&tr, v).unwrap();
    assert!(blocks.values().all(|x| *x == rat(2, 1)), "{blocks:?}");
}
