use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use wvsim::experiment::{run, CouplingConfig};
use wvsim::hilbert::{c, Arm, PathState};
use wvsim::par::Execution;
use wvsim::reconstruction::{bias_sweep_with, reconstruct_batch, Method};
use wvsim::tomography::estimate_ensemble;

const STRATEGIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn sweep(cr: &mut Criterion) {
    let pi = PathState::new(c(0.6, 0.0), c(0.8, 0.0)).unwrap();
    let mut group = cr.benchmark_group("bias_sweep");
    for n in [1_000usize, 100_000] {
        let alphas: Vec<f64> = (0..n).map(|k| 1e-3 + 1.57 * k as f64 / n as f64).collect();
        for (name, exec) in STRATEGIES {
            group.bench_with_input(BenchmarkId::new(name, n), &alphas, |b, alphas| {
                b.iter(|| bias_sweep_with(black_box(&pi), alphas, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn shot_ensemble(cr: &mut Criterion) {
    let pi = PathState::new(c(0.6, 0.0), c(0.8, 0.0)).unwrap();
    let out = run(&pi, &CouplingConfig::new(Arm::II, 1.0).unwrap(), &PathState::symmetric()).unwrap();
    let mut group = cr.benchmark_group("estimate_ensemble");
    for reps in [200u64, 5_000] {
        for (name, exec) in STRATEGIES {
            group.bench_with_input(BenchmarkId::new(name, reps), &reps, |b, &reps| {
                b.iter(|| estimate_ensemble(black_box(&out.conditional_spin), 10_000, 0, reps, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn strong_batch(cr: &mut Criterion) {
    let truths: Vec<PathState> = (0..20_000)
        .map(|k| {
            let t = k as f64 * 0.000_31;
            PathState::new(c(t.cos(), 0.2), c(t.sin(), -0.4)).unwrap()
        })
        .collect();
    let cfg = CouplingConfig::new(Arm::II, 0.9).unwrap();
    let sym = PathState::symmetric();
    let mut group = cr.benchmark_group("reconstruct_batch");
    for (name, exec) in STRATEGIES {
        group.bench_function(name, |b| {
            b.iter(|| reconstruct_batch(black_box(&truths), Method::Strong, &cfg, &sym, exec))
        });
    }
    group.finish();
}

criterion_group!(benches, sweep, shot_ensemble, strong_batch);
criterion_main!(benches);
