use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use nsit_core::datagen::generate_dataset;
use nsit_core::dynamics::{evolve_probabilities, transfer_matrix};
use nsit_core::linalg::{expm, CMatrix};
use nsit_core::measurement::{witness_gamma, MeasurementRecord};
use nsit_core::states::probability_vector_from_density;
use nsit_core::{build_basis, Complex64, DensityMatrix, GenerationConfig, GeneratorBasis, HamiltonianSpec};

/// Deterministic Hamiltonian with every generator switched on.
fn hamiltonian(basis: &GeneratorBasis) -> HamiltonianSpec {
    let dim = basis.dim();
    let mut m = CMatrix::zeros(dim, dim);
    for (n, g) in basis.generators().iter().enumerate() {
        m += g * Complex64::new(0.1 + 0.01 * n as f64, 0.0);
    }
    HamiltonianSpec::from_matrix(m).unwrap()
}

fn mixed_state(dim: usize) -> DensityMatrix {
    let mut m = CMatrix::from_fn(dim, dim, |i, j| Complex64::new(0.05, 0.02 * (j as f64 - i as f64)));
    for i in 0..dim {
        m[(i, i)] = Complex64::new(1.0 / dim as f64, 0.0);
    }
    DensityMatrix::new(m).unwrap()
}

fn basis(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_basis");
    for dim in [2, 4, 8] {
        group.bench_with_input(BenchmarkId::from_parameter(dim), &dim, |b, &dim| {
            b.iter(|| build_basis(black_box(dim)).unwrap())
        });
    }
    group.finish();
}

fn dynamics(c: &mut Criterion) {
    let mut group = c.benchmark_group("dynamics");
    for dim in [2, 4] {
        let basis = build_basis(dim).unwrap();
        let h = hamiltonian(&basis);
        let tm = transfer_matrix(&h, &basis).unwrap();
        let p = probability_vector_from_density(&mixed_state(dim), &basis).unwrap();
        group.bench_with_input(BenchmarkId::new("transfer_matrix", dim), &dim, |b, _| {
            b.iter(|| transfer_matrix(black_box(&h), &basis).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("expm", dim), &dim, |b, _| {
            b.iter(|| expm(&(tm.matrix() * black_box(2.5))))
        });
        group.bench_with_input(BenchmarkId::new("evolve", dim), &dim, |b, _| {
            b.iter(|| evolve_probabilities(&p, &tm, black_box(2.5)).unwrap())
        });
    }
    group.finish();
}

fn witness(c: &mut Criterion) {
    let mut group = c.benchmark_group("witness_gamma");
    for dim in [2, 4, 8] {
        let basis = build_basis(dim).unwrap();
        let p = probability_vector_from_density(&mixed_state(dim), &basis).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(dim), &dim, |b, _| {
            b.iter(|| witness_gamma(&p, black_box(MeasurementRecord::new(0, 0)), &basis).unwrap())
        });
    }
    group.finish();
}

fn datagen(c: &mut Criterion) {
    let mut group = c.benchmark_group("generate_dataset");
    group.sample_size(10);
    for dim in [2, 4] {
        let cfg = GenerationConfig::balanced(dim, 200, 7);
        group.bench_with_input(BenchmarkId::from_parameter(dim), &cfg, |b, cfg| {
            b.iter(|| generate_dataset(cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, basis, dynamics, witness, datagen);
criterion_main!(benches);
