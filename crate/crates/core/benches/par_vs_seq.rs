//! Rayon versus sequential execution of the data-parallel lanes: coverage
//! simulation replicates and grid sweeps. Both modes produce bitwise
//! identical results; the benches measure the speedup only.

use criterion::{criterion_group, criterion_main, Criterion};
use fid_core::dist::Distribution1D;
use fid_core::fiducial1d::{fiducial_geometric_numeric, FiducialVariant};
use fid_core::inference::{build_variant_with_boundary_fallback, pit_study_exec, ExecMode};
use fid_core::models::{stat_sample_with, ModelSpec};
use fid_core::numerics::exec::{map_indexed_par, map_indexed_seq};
use fid_core::numerics::rng::SplitMix64;
use std::hint::black_box;

fn coverage_simulation(c: &mut Criterion) {
    let model = ModelSpec::binomial(1).unwrap();
    let run = |mode: ExecMode| {
        let m = model.clone();
        let gen = move |rng: &mut SplitMix64| -> fid_core::error::Result<Box<dyn Distribution1D>> {
            let s = stat_sample_with(&m, 20, 0.3, rng)?;
            Ok(Box::new(build_variant_with_boundary_fallback(
                &m,
                20,
                s,
                FiducialVariant::Geometric,
            )?))
        };
        pit_study_exec("bench", 0.3, &[0.5, 0.95], 2_000, 7, gen, mode).unwrap()
    };
    let mut group = c.benchmark_group("coverage_simulation_2000_replicates");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| black_box(run(ExecMode::Sequential)))
    });
    group.bench_function("parallel", |b| {
        b.iter(|| black_box(run(ExecMode::Parallel)))
    });
    group.finish();
}

fn quadrature_grid_sweep(c: &mut Criterion) {
    // Quadrature-backed geometric fiducial of the logarithmic model: each
    // grid point runs an adaptive integral, a natural data-parallel sweep.
    let model = ModelSpec::logarithmic();
    let fid = fiducial_geometric_numeric(&model, 10, 12.0).unwrap();
    let grid: Vec<f64> = (1..=256).map(|i| i as f64 / 257.0).collect();
    let mut group = c.benchmark_group("geometric_cdf_grid_256_points");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| black_box(map_indexed_seq(grid.len(), |i| fid.cdf(grid[i]))))
    });
    group.bench_function("parallel", |b| {
        b.iter(|| black_box(map_indexed_par(grid.len(), |i| fid.cdf(grid[i]))))
    });
    group.finish();
}

criterion_group!(benches, coverage_simulation, quadrature_grid_sweep);
criterion_main!(benches);
