use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use vortexfield_bench::{dipole_source, opposite_pair, oval_model, weak_field};
use vortexfield_core::micromag::picard_solve;
use vortexfield_core::optimize::nelder_mead;
use vortexfield_core::poisson::solve_dirichlet;
use vortexfield_core::renorm::w0_conformal;
use vortexfield_core::{ConformalDomain, GridSpec, NelderMeadOptions};

fn poisson(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_dirichlet");
    for n in [32usize, 64, 128] {
        let f = dipole_source(GridSpec::new(n, 2 * n).unwrap());
        group.bench_with_input(BenchmarkId::from_parameter(n), &f, |b, f| {
            b.iter(|| solve_dirichlet(black_box(f)).unwrap())
        });
    }
    group.finish();
}

fn picard(c: &mut Criterion) {
    let a = opposite_pair();
    let h = weak_field();
    let mut group = c.benchmark_group("picard_solve");
    for n in [32usize, 64, 128] {
        let grid = GridSpec::new(n, 2 * n).unwrap();
        group.bench_function(BenchmarkId::from_parameter(n), |b| {
            b.iter(|| picard_solve(black_box(&a), &h, grid, 1e-9, 50).unwrap())
        });
    }
    group.finish();
}

fn conformal_energy(c: &mut Criterion) {
    let oval = ConformalDomain::oval();
    let a = opposite_pair();
    let mut group = c.benchmark_group("w0_conformal");
    for nodes in [256usize, 1024, 4096] {
        group.bench_function(BenchmarkId::from_parameter(nodes), |b| {
            b.iter(|| w0_conformal(&oval, black_box(&a), nodes).unwrap())
        });
    }
    group.finish();
}

fn simplex(c: &mut Criterion) {
    let model = oval_model(GridSpec::new(32, 64).unwrap());
    let opts = NelderMeadOptions::default();
    let mut group = c.benchmark_group("nelder_mead");
    group.sample_size(10);
    group.bench_function("oval_32x64", |b| {
        b.iter(|| nelder_mead(|s| model.objective(s), black_box([0.5, 2.5]), &opts).unwrap())
    });
    group.finish();
}

criterion_group!(benches, poisson, picard, conformal_energy, simplex);
criterion_main!(benches);
