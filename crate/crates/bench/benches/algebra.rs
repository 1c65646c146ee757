use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use gauge_triple::corpus;
use gauge_triple::hochschild::orientation_cycle_1graph;
use gauge_triple::spectral::{singular_profile, vertex_masses, vertex_of};
use gauge_triple_bench::{broom_model, broom_truncation, generators};

fn products(c: &mut Criterion) {
    let mut group = c.benchmark_group("generator_products");
    for depth in [3usize, 5] {
        let model = broom_model(3, depth);
        let gens = generators(&model, 2);
        group.bench_with_input(BenchmarkId::from_parameter(depth), &gens, |b, gens| {
            b.iter(|| {
                for x in gens {
                    for y in gens {
                        black_box(x.try_mul(y).unwrap());
                    }
                }
            })
        });
    }
    group.finish();
}

fn hochschild_boundary(c: &mut Criterion) {
    let model = broom_model(2, 5);
    let chain = orientation_cycle_1graph(&model);
    c.bench_function("orientation_boundary", |b| b.iter(|| black_box(chain.boundary().unwrap())));
}

fn spectral_profile(c: &mut Criterion) {
    let tr = broom_truncation(2, 3);
    let v = vertex_of(tr.graph(), "r").unwrap();
    let masses = vertex_masses(&tr, v).unwrap();
    c.bench_function("singular_profile_1e5", |b| {
        b.iter(|| black_box(singular_profile(&masses, 100_000).unwrap()))
    });
}

fn parse(c: &mut Criterion) {
    let text = corpus::dyadic_tree(6);
    c.bench_function("parse_dyadic_6", |b| b.iter(|| black_box(corpus::graph(&text))));
}

criterion_group!(benches, products, hochschild_boundary, spectral_profile, parse);
criterion_main!(benches);
