use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use extremal_core::ht::{solve_c0, HtParams};
use extremal_core::hw::{HwModel, HwParams};
use extremal_core::invlogistic::{simulate, LogisticXi};
use extremal_core::laplace::{families, scaled_integral};
use extremal_core::numerics::{integrate_log, Interval};

fn quadrature(c: &mut Criterion) {
    c.bench_function("integrate_log gaussian e^-4000", |b| {
        b.iter(|| integrate_log(|x: f64| -4000.0 - x * x, Interval::real_line(), 1e-12).unwrap())
    });
    let fam = families::power(3);
    c.bench_function("scaled_integral -n x^3, n=1e6", |b| {
        b.iter(|| scaled_integral(&fam, black_box(1e6)).unwrap())
    });
}

fn hw(c: &mut Criterion) {
    let m = HwModel::new(HwParams::table_s1(), false).unwrap();
    c.bench_function("hw survival_logy(30)", |b| {
        b.iter(|| m.survival_logy(black_box(30.0)).unwrap())
    });
    c.bench_function("hw chi_u(100)", |b| {
        b.iter(|| m.chi_u(black_box(100.0)).unwrap())
    });
    c.bench_function("hw integrand_modes(100)", |b| {
        b.iter(|| m.integrand_modes(black_box(100.0)).unwrap())
    });
}

fn ht(c: &mut Criterion) {
    c.bench_function("solve_c0", |b| {
        b.iter(|| solve_c0(black_box(0.4), black_box(2.0), black_box(2.5)).unwrap())
    });
    let p = HtParams::new(0.0, 0.65, 0.35, 1.0 / 0.35, 1.3).unwrap();
    c.bench_function("ht joint_logsf(20)", |b| {
        b.iter(|| p.joint_logsf(black_box(20.0)).unwrap())
    });
}

fn sim(c: &mut Criterion) {
    let xi = LogisticXi::new(0.35).unwrap();
    c.bench_function("simulate n=10000", |b| {
        b.iter(|| simulate(xi, 10_000, black_box(42)))
    });
}

criterion_group!(benches, quadrature, hw, ht, sim);
criterion_main!(benches);
