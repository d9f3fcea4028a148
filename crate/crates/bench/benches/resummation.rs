use std::f64::consts::PI;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use divergent_bench::{euler, euler_borel, real, unfolding, SAMPLE_X};
use divergent_core::axioms::{run_axiom_suite, AxiomConfig};
use divergent_core::borel::{borel_sum, detect_stokes, pade_fit_robust, stokes_jump};
use divergent_core::truncation::truncation_sweep;
use divergent_core::unfolding::connection_coefficient;
use divergent_core::{euler_exact, EulerMethod, Ray};

fn oracle(c: &mut Criterion) {
    let mut g = c.benchmark_group("euler_exact");
    for x in SAMPLE_X {
        g.bench_with_input(BenchmarkId::new("laplace", x), &x, |b, &x| {
            b.iter(|| euler_exact(real(x), EulerMethod::Laplace, 1e-12).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("direct", x), &x, |b, &x| {
            b.iter(|| euler_exact(real(x), EulerMethod::Direct, 1e-12).unwrap())
        });
    }
    g.finish();
}

fn truncation(c: &mut Criterion) {
    c.bench_function("truncation_sweep x=0.1 k<=30", |b| {
        b.iter(|| truncation_sweep(0.1, 30).unwrap())
    });
}

fn borel(c: &mut Criterion) {
    let mut g = c.benchmark_group("borel");
    for order in [12, 24, 40] {
        let bs = euler_borel(order);
        g.bench_with_input(BenchmarkId::new("pade_fit_robust", order), &order, |b, &n| {
            b.iter(|| pade_fit_robust(&bs, n / 2, n / 2, 1e-14).unwrap())
        });
        let s = euler(order);
        g.bench_with_input(BenchmarkId::new("borel_sum x=0.1", order), &order, |b, &n| {
            b.iter(|| borel_sum(&s, real(0.1), Ray::new(0.0), n, 1e-12).unwrap())
        });
    }
    let bs = euler_borel(20);
    g.bench_function("detect_stokes order=20", |b| b.iter(|| detect_stokes(&bs, 20).unwrap()));
    let s = euler(24);
    g.bench_function("stokes_jump x=-0.1", |b| {
        b.iter(|| stokes_jump(&s, real(-0.1), Ray::new(PI - 0.3), Ray::new(PI + 0.3), 24, 1e-12).unwrap())
    });
    g.finish();
}

fn unfold(c: &mut Criterion) {
    let cfg = unfolding(0.04);
    c.bench_function("connection_coefficient eps=0.04", |b| {
        b.iter(|| connection_coefficient(&cfg, 0.1).unwrap())
    });
}

fn axioms(c: &mut Criterion) {
    let mut g = c.benchmark_group("axioms");
    g.sample_size(10);
    g.bench_function("default suite", |b| {
        b.iter(|| run_axiom_suite(&AxiomConfig::default()).unwrap())
    });
    g.finish();
}

criterion_group!(benches, oracle, truncation, borel, unfold, axioms);
criterion_main!(benches);
