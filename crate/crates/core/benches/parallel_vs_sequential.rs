use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;

use ruelle_core::exec::Execution;
use ruelle_core::forms::{capital_omega_r, Sign};
use ruelle_core::lie::{build_model, Family};
use ruelle_core::spectrum::{bolza_generators, enumerate_with, EnumerationParams};
use ruelle_core::zeta::{selberg_zeta, TruncationParams};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn form_determinant(c: &mut Criterion) {
    let model = build_model(Family::ComplexHyperbolic(2)).unwrap();
    let mut group = c.benchmark_group("form_determinant");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, "complex-hyperbolic(2)"), |b| {
            b.iter(|| capital_omega_r(black_box(&model), Sign::Plus, exec).unwrap())
        });
    }
    group.finish();
}

fn enumeration(c: &mut Criterion) {
    let p = bolza_generators();
    let mut group = c.benchmark_group("enumeration");
    group.sample_size(10);
    for (name, exec) in MODES {
        let params = EnumerationParams::new(8, 10.0).with_exec(exec);
        group.bench_function(BenchmarkId::new(name, "w8_l10"), |b| {
            b.iter(|| enumerate_with(black_box(&p), &params).unwrap())
        });
    }
    group.finish();
}

fn zeta(c: &mut Criterion) {
    let spec = enumerate_with(&bolza_generators(), &EnumerationParams::new(9, 11.0)).unwrap();
    let s = Complex64::new(2.5, 1.0);
    let mut group = c.benchmark_group("selberg_zeta");
    for (name, exec) in MODES {
        let params = TruncationParams::for_spectrum(&spec).with_exec(exec);
        group.bench_function(BenchmarkId::new(name, "n_max_20"), |b| {
            b.iter(|| selberg_zeta(black_box(&spec), s, &params).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, form_determinant, enumeration, zeta);
criterion_main!(benches);
