use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use qcgeom::harmonic::{check_subharmonic, closed_modulus_with, subharmonic_exponent, DiskGrid, HarmonicPlanarMap};
use qcgeom::metrics::{seittenranta_with, DomainSpec};
use qcgeom::Exec;

const MODES: [(&str, Exec); 2] = [("seq", Exec::Sequential), ("par", Exec::Parallel)];

fn closed_modulus(c: &mut Criterion) {
    let f = HarmonicPlanarMap::counterexample(256);
    let grid = DiskGrid { n_theta: 1024, ..DiskGrid::default() };
    let mut g = c.benchmark_group("closed_modulus");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| closed_modulus_with(e, &f, black_box(0.01), &grid).unwrap())
        });
    }
    g.finish();
}

fn subharmonic_scan(c: &mut Criterion) {
    let f = HarmonicPlanarMap::linear(0.5);
    let q = subharmonic_exponent(0.5).unwrap();
    let mut g = c.benchmark_group("subharmonic_scan");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| check_subharmonic(e, &f, black_box(q), 0.999, 201, 1e-9).unwrap())
        });
    }
    g.finish();
}

fn seittenranta_sup(c: &mut Criterion) {
    let d = DomainSpec::half_space(2, 4001).unwrap();
    let mut g = c.benchmark_group("seittenranta");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| seittenranta_with(e, &d, black_box(&[0.1, 0.5]), &[0.4, 1.2]).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, closed_modulus, subharmonic_scan, seittenranta_sup);
criterion_main!(benches);
