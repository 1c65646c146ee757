use std::collections::BTreeSet;
use std::sync::Arc;

use gauge_triple::corpus;
use gauge_triple::hochschild::{
    check_orientation_1graph, check_orientation_kgraph, orientation_cycle_1graph, orientation_cycle_kgraph,
    vertex_multiplicity_formula, Chain,
};
use gauge_triple::spectral::path_generators;
use gauge_triple::{GaussianRational, KGraph};
use proptest::prelude::*;
use serde_json::Value;

fn models() -> Vec<Arc<KGraph>> {
    vec![
        corpus::graph(&corpus::cycle(2)).expand(3).unwrap(),
        corpus::graph(&corpus::broom(2)).expand(3).unwrap(),
        corpus::graph(&corpus::rose(2)).expand(2).unwrap(),
        corpus::kgraph(&corpus::torus(2)).graph,
        corpus::kgraph(&corpus::two_vertex()).graph,
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn boundary_squares_to_zero(
        m in 0usize..5,
        terms in prop::collection::vec((prop::collection::vec(0usize..1000, 5), -3i64..=3), 1..=3),
        arity in 3usize..=5,
    ) {
        let g = &models()[m];
        let gens = path_generators(g, 2);
        let mut c = Chain::zero(g, arity);
        for (picks, coeff) in &terms {
            let factors: Vec<_> = picks[..arity].iter().map(|&i| gens[i % gens.len()].clone()).collect();
            c.add_tensor(&factors, &GaussianRational::from_int(*coeff)).unwrap();
        }
        let bb = c.boundary().unwrap().boundary().unwrap();
        prop_assert!(bb.is_zero(), "b∘b ≠ 0 on {:?}", c.to_json_value());
    }
}

#[test]
fn orientation_boundary_matches_vertex_formula() {
    let mut graphs: Vec<(String, String)> = corpus::single_entry_graphs();
    graphs.push(("rose-3".into(), corpus::rose(3)));
    graphs.push(("path-to-sink".into(), corpus::path_to_sink(2)));
    graphs.push(("loop-with-exit".into(), corpus::loop_with_exit()));
    for (name, text) in graphs {
        let model = corpus::graph(&text).expand(3).unwrap();
        let b = orientation_cycle_1graph(&model).boundary().unwrap().to_element().unwrap();
        assert_eq!(b, vertex_multiplicity_formula(&model), "{name}");
    }
}

#[test]
fn single_entry_cycles_close_at_every_depth() {
    for (name, text) in corpus::single_entry_graphs() {
        let p = corpus::graph(&text);
        for depth in 2..=5 {
            let r = check_orientation_1graph(&p.expand(depth).unwrap()).unwrap();
            assert!(r.interior_zero && r.pi_d_identity && r.pi_d_fixes_basis, "{name} at depth {depth}");
        }
    }
}

#[test]
fn single_exit_kgraph_cycles_close() {
    for (name, text) in corpus::single_exit_kgraphs() {
        let r = check_orientation_kgraph(&corpus::kgraph(&text)).unwrap();
        assert!(r.boundary_zero && r.pi_d_volume_form && r.pi_d_self_adjoint, "{name}");
    }
}

fn rename(s: &str) -> String {
    format!("{s}_r")
}

/// The document with every vertex and edge identifier renamed.
fn renamed_doc(text: &str) -> String {
    let mut v: Value = serde_json::from_str(text).unwrap();
    let map = |x: &mut Value| *x = Value::String(rename(x.as_str().unwrap()));
    v["vertices"].as_array_mut().unwrap().iter_mut().for_each(map);
    for e in v["edges"].as_array_mut().unwrap() {
        for f in ["id", "source", "range"] {
            map(&mut e[f]);
        }
    }
    if let Some(ts) = v.get_mut("tails").and_then(Value::as_array_mut) {
        ts.iter_mut().for_each(map);
    }
    if let Some(sq) = v.get_mut("squares").and_then(Value::as_array_mut) {
        for s in sq {
            for side in ["first", "second"] {
                s[side].as_array_mut().unwrap().iter_mut().for_each(map);
            }
        }
    }
    v.to_string()
}

/// Terms of a chain as JSON strings, with path names passed through `f`.
fn term_set(c: &Chain, f: impl Fn(&str) -> String + Copy) -> BTreeSet<String> {
    fn walk(v: &mut Value, f: impl Fn(&str) -> String + Copy) {
        match v {
            Value::Object(m) => {
                for (k, x) in m.iter_mut() {
                    if k == "mu" || k == "nu" {
                        for name in x.as_array_mut().unwrap() {
                            *name = Value::String(f(name.as_str().unwrap()));
                        }
                    } else {
                        walk(x, f);
                    }
                }
            }
            Value::Array(xs) => xs.iter_mut().for_each(|x| walk(x, f)),
            _ => {}
        }
    }
    let mut v = c.to_json_value();
    walk(&mut v, f);
    v["terms"].as_array().unwrap().iter().map(Value::to_string).collect()
}

#[test]
fn cycles_are_relabeling_equivariant() {
    for text in [corpus::cycle(3), corpus::cycles(&[1, 2]), corpus::rose(2)] {
        let a = orientation_cycle_1graph(&corpus::graph(&text).expand(2).unwrap());
        let b = orientation_cycle_1graph(&corpus::graph(&renamed_doc(&text)).expand(2).unwrap());
        assert_eq!(term_set(&a, rename), term_set(&b, |s| s.to_string()));
    }
    for text in [corpus::torus(2), corpus::two_vertex(), corpus::torus(3)] {
        let a = orientation_cycle_kgraph(&corpus::kgraph(&text)).unwrap().full();
        let b = orientation_cycle_kgraph(&corpus::kgraph(&renamed_doc(&text))).unwrap().full();
        assert_eq!(term_set(&a, rename), term_set(&b, |s| s.to_string()));
    }
}
