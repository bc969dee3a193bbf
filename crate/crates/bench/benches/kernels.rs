use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use steinersym::angles::vdc_prefix;
use steinersym::{
    discrepancy, iterate, rearrange_1d, rearrange_radial, rotate, steiner_direction, Builtin,
    DirectionSequence, DyadicAngle, IterateConfig,
};

fn angles(c: &mut Criterion) {
    let mut group = c.benchmark_group("discrepancy");
    for n in [64usize, 256, 1024] {
        let points = vdc_prefix(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &points, |b, p| {
            b.iter(|| discrepancy(black_box(p)).unwrap())
        });
    }
    group.finish();
}

fn rearrange(c: &mut Criterion) {
    let values: Vec<f64> = (0..1024).map(|i| ((i * 7919) % 1024) as f64).collect();
    c.bench_function("rearrange_1d/1024", |b| {
        b.iter(|| rearrange_1d(black_box(&values)).unwrap())
    });
}

fn grid(c: &mut Criterion) {
    let eighth = DyadicAngle::new(1, 3).unwrap();
    let mut group = c.benchmark_group("grid");
    for n in [64usize, 128, 256] {
        let f = Builtin::Bump.sample(n, 2.0).unwrap();
        group.bench_with_input(BenchmarkId::new("rotate", n), &f, |b, f| {
            b.iter(|| rotate(black_box(f), eighth))
        });
        group.bench_with_input(BenchmarkId::new("steiner_direction", n), &f, |b, f| {
            b.iter(|| steiner_direction(black_box(f), eighth).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("rearrange_radial", n), &f, |b, f| {
            b.iter(|| rearrange_radial(black_box(f)))
        });
    }
    group.finish();
}

fn experiment(c: &mut Criterion) {
    let f = Builtin::Bump.sample(64, 2.0).unwrap();
    let config = IterateConfig::new(32);
    let mut group = c.benchmark_group("iterate");
    group.sample_size(10);
    group.bench_function("vdc/64x64/32", |b| {
        b.iter(|| {
            iterate(
                black_box(&f),
                &DirectionSequence::VanDerCorput,
                &config,
                "bump",
            )
            .unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, angles, rearrange, grid, experiment);
criterion_main!(benches);
