use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use wiggle_core::disorder::{ensemble, EnsembleSpec};
use wiggle_core::heterostructure::{InterfaceShape, ProfileSpec};
use wiggle_core::valley::{scan::q_grid, scan_q, BlochCoefficientTable, ValleyConfig};
use wiggle_core::{Execution, MaterialConstants};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn bench_scan(c: &mut Criterion) {
    let constants = MaterialConstants::default();
    let table = BlochCoefficientTable::diamond_model_broken(&constants, 7, 0.2);
    let template = ProfileSpec::wiggle(0.05, 1.0);
    let grid = q_grid(0.0, 25.0, 48);
    let config = ValleyConfig::default();
    let mut group = c.benchmark_group("scan_q");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| scan_q(&template, &grid, &table, &config, &constants, exec).unwrap())
        });
    }
    group.finish();
}

fn bench_ensemble(c: &mut Criterion) {
    let constants = MaterialConstants::default();
    let table = BlochCoefficientTable::fallback();
    let spec = EnsembleSpec {
        profile: ProfileSpec {
            interface_shape: InterfaceShape::LinearGrade,
            wavelength: Some(1.8),
            depth_below: 15.0,
            ..ProfileSpec::default().with_average_concentration(0.05)
        },
        n_samples: 8,
        ..Default::default()
    };
    let config = ValleyConfig::default();
    let mut group = c.benchmark_group("ensemble");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| ensemble(&spec, &table, &config, &constants, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_scan, bench_ensemble);
criterion_main!(benches);
