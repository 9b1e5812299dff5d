//! Throughput comparison of the two trial-map backends on the crate's two
//! hot loops: exact walk enumeration and Monte Carlo Green-function moments.
//! Run with `cargo bench` (rayon backend) or
//! `cargo bench --no-default-features` (everything degrades to the
//! sequential loop, which should then tie the sequential baseline).

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use andergraph_core::graph::{build_lattice_box, DEFAULT_VERTEX_BUDGET};
use andergraph_core::resolvent::fractional_moments_mc;
use andergraph_core::saw::{count_saws_with, DEFAULT_EXTENSION_BUDGET};
use andergraph_core::{
    DisorderModel, FiniteVolume, Parallelism, SpectralParams, UniformDensity, VertexId,
};
use num_complex::Complex64;

const BACKENDS: [(&str, Parallelism); 2] =
    [("sequential", Parallelism::Sequential), ("auto", Parallelism::Auto)];

fn walk_enumeration(c: &mut Criterion) {
    let g = build_lattice_box(2, 10, DEFAULT_VERTEX_BUDGET).unwrap();
    let origin = g.vertex_by_label("(0,0)").unwrap();
    let mut group = c.benchmark_group("walk_enumeration");
    for (name, parallelism) in BACKENDS {
        group.bench_with_input(
            BenchmarkId::new("grid_counts_to_9", name),
            &parallelism,
            |b, &par| {
                b.iter(|| {
                    count_saws_with(
                        black_box(&g),
                        origin,
                        9,
                        DEFAULT_EXTENSION_BUDGET,
                        par,
                    )
                    .unwrap()
                })
            },
        );
    }
    group.finish();
}

fn moment_sampling(c: &mut Criterion) {
    let g = build_lattice_box(1, 50, DEFAULT_VERTEX_BUDGET).unwrap();
    let volume = FiniteVolume::whole(&g);
    let model = DisorderModel::new(10.0, UniformDensity::symmetric_unit(), 5).unwrap();
    let params = SpectralParams::new(Complex64::new(1.0, 0.5), 0.5).unwrap();
    let x = g.vertex_by_label("(0)").unwrap();
    let ys: Vec<VertexId> =
        (0..=3).map(|d| g.vertex_by_label(&format!("({d})")).unwrap()).collect();

    let mut group = c.benchmark_group("moment_sampling");
    group.sample_size(10);
    for (name, parallelism) in BACKENDS {
        group.bench_with_input(
            BenchmarkId::new("chain_101_fractional_100_trials", name),
            &parallelism,
            |b, &par| {
                b.iter(|| {
                    fractional_moments_mc(
                        black_box(&g),
                        &volume,
                        &model,
                        params,
                        x,
                        &ys,
                        100,
                        par,
                    )
                    .unwrap()
                })
            },
        );
    }
    group.finish();
}

criterion_group!(benches, walk_enumeration, moment_sampling);
criterion_main!(benches);
