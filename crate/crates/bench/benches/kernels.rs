use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use steerlab_bench::{fixture_states, small_box, werner};
use steerlab_core::discrete::optimal_chsh;
use steerlab_core::phase_space::{Axis, PhaseSpacePoint};
use steerlab_core::quadrature::{integrate4, marginalize};

fn wigner_eval(c: &mut Criterion) {
    let mut group = c.benchmark_group("wigner");
    let p = PhaseSpacePoint::new(0.3, -0.7, 1.1, 0.2);
    for s in fixture_states() {
        group.bench_with_input(BenchmarkId::from_parameter(s), &s, |b, s| b.iter(|| s.wigner(black_box(&p))));
    }
    group.finish();
}

fn integrate(c: &mut Criterion) {
    let mut group = c.benchmark_group("integrate4");
    group.sample_size(10);
    for s in fixture_states() {
        let bx = small_box(&s, 33);
        group.bench_with_input(BenchmarkId::from_parameter(s), &s, |b, s| {
            b.iter(|| integrate4(|p| s.wigner(p), &bx).unwrap())
        });
    }
    group.finish();
}

fn marginal(c: &mut Criterion) {
    let mut group = c.benchmark_group("marginalize");
    group.sample_size(10);
    for s in fixture_states() {
        let bx = small_box(&s, 33);
        group.bench_with_input(BenchmarkId::from_parameter(s), &s, |b, s| {
            b.iter(|| marginalize(s, (Axis::X, Axis::Y), &bx).unwrap())
        });
    }
    group.finish();
}

fn chsh(c: &mut Criterion) {
    let rho = werner(0.8);
    c.bench_function("optimal_chsh/werner:p=0.8", |b| b.iter(|| optimal_chsh(black_box(&rho))));
}

criterion_group!(benches, wigner_eval, integrate, marginal, chsh);
criterion_main!(benches);
