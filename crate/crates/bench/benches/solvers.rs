use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use treestep::solvers::{fse_solve, single_expansion, FseSelection, PartialPerturbation};
use treestep::testing::{random_instance, random_problem};
use treestep::{
    exhaustive_solve, run_trial, sample_rayleigh, sigma_for_snr, treestep_solve, PrecoderTag,
    RngStream, SweepConfig, TreeStepParams, VppProblem,
};

fn treestep_params(c: &mut Criterion) {
    let p = random_problem(8, 8, 4, 1);
    let mut group = c.benchmark_group("treestep_8x8");
    for params in [
        TreeStepParams::new(1, 1, 0),
        TreeStepParams::new(2, 1, 0),
        TreeStepParams::new(1, 1, 3),
    ] {
        let id = format!("L{}V{}K{}", params.l, params.v, params.k);
        group.bench_function(id, |b| {
            let mut rng = RngStream::from_seed(0);
            b.iter(|| treestep_solve(black_box(&p), &params, &mut rng).unwrap())
        });
    }
    group.finish();
}

fn single_expansion_scaling(c: &mut Criterion) {
    let mut group = c.benchmark_group("single_expansion");
    for n in [4usize, 8, 16] {
        let p = random_problem(n, n, 4, 2);
        let q = PartialPerturbation { values: vec![0; 2 * n], depth: 1 };
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| single_expansion(black_box(&p), &q, None).unwrap())
        });
    }
    group.finish();
}

fn fse(c: &mut Criterion) {
    let (w, u, tau) = random_instance(8, 8, 4, 3);
    let p = VppProblem::new(&w, &u, tau).unwrap();
    let mut group = c.benchmark_group("fse_8x8");
    for (name, sel) in [("l2", FseSelection::L2), ("linf", FseSelection::Linf)] {
        group.bench_function(name, |b| b.iter(|| fse_solve(black_box(&p), &w, &u, 1, sel).unwrap()));
    }
    group.finish();
}

fn exhaustive(c: &mut Criterion) {
    let p = random_problem(2, 2, 4, 4);
    c.bench_function("exhaustive_2x2_v1", |b| b.iter(|| exhaustive_solve(black_box(&p), 1).unwrap()));
}

fn trial(c: &mut Criterion) {
    let cfg = SweepConfig::default();
    let ch = sample_rayleigh(8, 8, &mut RngStream::from_seed(5)).unwrap();
    let snr = sigma_for_snr(cfg.power, 10.0, 8).unwrap();
    let mut group = c.benchmark_group("trial_8x8");
    for tag in [PrecoderTag::Rzf, PrecoderTag::FseMod, PrecoderTag::TreeStep] {
        group.bench_function(tag.as_str(), |b| {
            let mut rng = RngStream::from_seed(6);
            b.iter(|| run_trial(&cfg, tag, &ch, &snr, &mut rng).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, treestep_params, single_expansion_scaling, fse, exhaustive, trial);
criterion_main!(benches);
