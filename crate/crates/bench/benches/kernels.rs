use criterion::{criterion_group, criterion_main, Criterion};
use kazhdan_bench::{plane_73, quadrangle};
use kazhdan_core::diffsets::{search_difference_set, singer_difference_set};
use kazhdan_core::graphs;
use kazhdan_core::spectra::{normalized_laplacian_gap, DEFAULT_TOLERANCE};

fn girth(c: &mut Criterion) {
    let plane = plane_73();
    let quad = quadrangle(7);
    c.bench_function("girth plane 146", |b| b.iter(|| graphs::girth(&plane)));
    c.bench_function("girth quadrangle 784", |b| b.iter(|| graphs::girth(&quad)));
    c.bench_function("diameter quadrangle 784", |b| b.iter(|| graphs::diameter(&quad)));
}

fn spectra(c: &mut Criterion) {
    let plane = plane_73();
    let quad = quadrangle(3);
    c.bench_function("gap plane 146", |b| {
        b.iter(|| normalized_laplacian_gap(&plane, "plane", DEFAULT_TOLERANCE).unwrap())
    });
    c.bench_function("gap quadrangle 72", |b| {
        b.iter(|| normalized_laplacian_gap(&quad, "quadrangle", DEFAULT_TOLERANCE).unwrap())
    });
}

fn diffsets(c: &mut Criterion) {
    c.bench_function("search q=8", |b| b.iter(|| search_difference_set(8).unwrap()));
    c.bench_function("singer q=32", |b| b.iter(|| singer_difference_set(32).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = girth, spectra, diffsets
}
criterion_main!(benches);
