//! Acceptance criteria, one line per criterion. Run with
//! `cargo test -p treestep --test acceptance`; exits nonzero on any failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use treestep::harness::stats::{intervals_overlap, significantly_below, wilson95};
use treestep::harness::{complexity_exponent, render, DEFAULT_PARAM_GRID};
use treestep::solvers::local_min_dim;
use treestep::testing::{random_instance, random_problem};
use treestep::{
    exhaustive_solve, objective, run_param_study, run_sweep, run_trial, sample_rayleigh,
    treestep_solve, BerRecord, ComplexMatrix, OutputFormat, PerturbationVector, PrecoderTag,
    RngStream, SnrConfig, SweepConfig, TreeStepParams, VppProblem, C64,
};

/// 8x8 4-QAM SNR at which RZF sits near BER 1e-2 (measured: 1.01e-2 over
/// 4.2e6 bits).
const ORDERING_SNR_DB: f64 = 11.5;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

struct Suite {
    failures: usize,
}

impl Suite {
    fn run(&mut self, id: &str, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let out = f();
        let elapsed = start.elapsed();
        let in_time = limit.is_none_or(|l| elapsed < l);
        let passed = out.passed && in_time;
        if !passed {
            self.failures += 1;
        }
        let limit_note = match limit {
            Some(l) if !in_time => format!(", over the {:.0} s limit", l.as_secs_f64()),
            Some(l) => format!(", limit {:.0} s", l.as_secs_f64()),
            None => String::new(),
        };
        println!(
            "[{}] {id} {name}: {} ({:.2} s{limit_note})",
            if passed { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
        );
    }
}

fn linf(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `W (u + τ v)` with plain loops, independent of the real-domain code path.
fn complex_objective(w: &ComplexMatrix, u: &[C64], v: &[C64], tau: f64) -> f64 {
    let d: Vec<C64> = u.iter().zip(v).map(|(a, b)| a + tau * b).collect();
    let out: Vec<C64> = (0..w.rows())
        .map(|r| (0..w.cols()).map(|c| w[(r, c)] * d[c]).sum())
        .collect();
    linf(&out)
}

fn oracle_equivalence() -> Outcome {
    let mut mismatches = 0;
    for i in 0..200u64 {
        let nu = 1 + (i % 2) as usize;
        let p = random_problem(nu, nu, 4, 10_000 + i);
        let params = TreeStepParams::new(2 * nu as u32, 1, 0);
        let ts = treestep_solve(&p, &params, &mut RngStream::derive(1, &[i])).unwrap();
        let ex = exhaustive_solve(&p, 1).unwrap();
        if ts.objective.to_bits() != ex.objective.to_bits() {
            mismatches += 1;
        }
    }
    outcome(mismatches == 0, format!("{mismatches}/200 objectives differ from the oracle"))
}

fn local_minimization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let zero = C64::new(0.0, 0.0);
    let (mut value_misses, mut argmin_misses, mut ties) = (0, 0, 0);
    let draws = 10_000;
    for i in 0..draws {
        let w = C64::from_polar(rng.random_range(0.1..2.0), rng.random_range(0.0..std::f64::consts::TAU));
        let tau = rng.random_range(0.5..25.0);
        // a = -τ w t + (component orthogonal to w) puts the continuous
        // minimizer at t, inside the brute-force window
        let t = if i % 10 == 0 {
            rng.random_range(-45i64..45) as f64 + 0.5
        } else {
            rng.random_range(-45.0..45.0)
        };
        let ortho = C64::new(0.0, rng.random_range(-10.0..10.0)) * w / w.norm();
        let a = -tau * w * t + ortho;
        let current = rng.random_range(-5i64..=5);

        let p = VppProblem::new(&ComplexMatrix::from_rows(&[vec![w]]).unwrap(), &[zero], tau).unwrap();
        let residual = a + tau * w * current as f64;
        let lm = local_min_dim(&p, &[residual], 0, 0, current);

        let vals: Vec<(i64, f64)> = (-50..=50i64).map(|x| (x, (a + tau * w * x as f64).norm_sqr())).collect();
        let best = vals.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
        let tol = 1e-9 * best.max(1.0);
        let co_optima: Vec<i64> = vals.iter().filter(|v| v.1 <= best + tol).map(|v| v.0).collect();
        if co_optima.len() > 1 {
            ties += 1;
        }
        if (lm.f_star - best).abs() > tol {
            value_misses += 1;
        }
        if !co_optima.contains(&lm.x_star) {
            argmin_misses += 1;
        }
    }
    outcome(
        value_misses == 0 && argmin_misses == 0,
        format!("{value_misses} value and {argmin_misses} argmin misses in {draws} draws ({ties} ties)"),
    )
}

fn transform_fidelity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let nu = rng.random_range(1..=8);
        let nt = nu + rng.random_range(0..=8);
        let data = (0..nt * nu)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let w = ComplexMatrix::from_row_major(nt, nu, data).unwrap();
        let u: Vec<C64> = (0..nu)
            .map(|_| C64::new(rng.random_range(-7.0..7.0), rng.random_range(-7.0..7.0)))
            .collect();
        let v: Vec<C64> = (0..nu)
            .map(|_| C64::new(rng.random_range(-3..=3) as f64, rng.random_range(-3..=3) as f64))
            .collect();
        let tau = rng.random_range(1.0..25.0);
        let mut stacked: Vec<i64> = v.iter().map(|z| z.re as i64).collect();
        stacked.extend(v.iter().map(|z| z.im as i64));

        let p = VppProblem::new(&w, &u, tau).unwrap();
        let real = objective(&p, &PerturbationVector(stacked)).unwrap();
        let complex = complex_objective(&w, &u, &v, tau);
        worst = worst.max((real - complex).abs() / complex);
    }
    outcome(worst <= 1e-12, format!("max relative gap {worst:.2e} over 1000 draws"))
}

fn never_worse_than_zf() -> Outcome {
    let params = TreeStepParams::new(1, 1, 0);
    let (mut worse_than_zero, mut worse_than_zf) = (0, 0);
    for i in 0..10_000u64 {
        let (w, u, tau) = random_instance(8, 8, 4, 40_000 + i);
        let p = VppProblem::new(&w, &u, tau).unwrap();
        let ts = treestep_solve(&p, &params, &mut RngStream::derive(4, &[i])).unwrap();
        // same evaluation path as the candidate pool: exact comparison
        if ts.objective > objective(&p, &PerturbationVector::zeros(16)).unwrap() {
            worse_than_zero += 1;
        }
        // independent evaluation sums in a different order; compare at the
        // transform-fidelity tolerance
        let zf = complex_objective(&w, &u, &[C64::new(0.0, 0.0); 8], tau);
        if ts.objective > zf * (1.0 + 1e-12) {
            worse_than_zf += 1;
        }
    }
    outcome(
        worse_than_zero == 0 && worse_than_zf == 0,
        format!(
            "{worse_than_zero}/10000 above the v = 0 objective, {worse_than_zf}/10000 above ||Wu||inf (1e-12 relative)"
        ),
    )
}

fn noiseless_zero_ber() -> Outcome {
    let mut parts = Vec::new();
    let mut total = 0;
    let cases = [
        (PrecoderTag::Fse, 8),
        (PrecoderTag::FseMod, 8),
        (PrecoderTag::TreeStep, 8),
        (PrecoderTag::Oracle, 2),
    ];
    for (tag, n) in cases {
        let cfg = SweepConfig { n_users: n, n_tx: n, ..Default::default() };
        let snr = SnrConfig::noiseless(1.0, n);
        let mut errors = 0;
        for t in 0..1000u64 {
            let ch = sample_rayleigh(n, n, &mut RngStream::derive(5, &[0, t])).unwrap();
            errors += run_trial(&cfg, tag, &ch, &snr, &mut RngStream::derive(5, &[1, t])).unwrap().bit_errors;
        }
        total += errors;
        parts.push(format!("{tag} {n}x{n}: {errors}"));
    }
    outcome(total == 0, format!("bit errors over 1000 trials each: {}", parts.join(", ")))
}

fn ordering_config(workers: usize) -> SweepConfig {
    SweepConfig {
        n_users: 8,
        n_tx: 8,
        mod_order: 4,
        snr_grid_db: vec![ORDERING_SNR_DB],
        precoders: vec![PrecoderTag::TreeStep, PrecoderTag::FseMod, PrecoderTag::Fse, PrecoderTag::Rzf],
        treestep_params: TreeStepParams::new(1, 1, 0),
        fse_v: 1,
        n_channels: 512,
        n_vectors_per_channel: 128,
        master_seed: 6,
        workers,
        early_abort: None,
        ..Default::default()
    }
}

fn errors_of(records: &[BerRecord], tag: PrecoderTag) -> (u64, u64) {
    let r = records.iter().find(|r| r.precoder == tag).expect("precoder present");
    (r.bit_errors, r.bits_total)
}

fn ber_ordering(records: &[BerRecord]) -> Outcome {
    let ts = errors_of(records, PrecoderTag::TreeStep);
    let fm = errors_of(records, PrecoderTag::FseMod);
    let fs = errors_of(records, PrecoderTag::Fse);
    let rz = errors_of(records, PrecoderTag::Rzf);
    let ber = |e: (u64, u64)| e.0 as f64 / e.1 as f64;
    let rzf_near = (0.5e-2..=2e-2).contains(&ber(rz));
    let enough_bits = [ts, fm, fs, rz].iter().all(|e| e.1 >= 200_000);
    let strict_low = significantly_below(ts, fm);
    let mid = ber(fm) <= ber(fs);
    let strict_high = significantly_below(fs, rz);
    let fmt = |name: &str, e: (u64, u64)| {
        let (lo, hi) = wilson95(e.0, e.1);
        format!("{name} {:.3e} [{lo:.3e}, {hi:.3e}]", ber(e))
    };
    outcome(
        rzf_near && enough_bits && strict_low && mid && strict_high,
        format!(
            "{} bits each at {ORDERING_SNR_DB} dB; {}; {}; {}; {}",
            ts.1,
            fmt("treestep", ts),
            fmt("fse_mod", fm),
            fmt("fse", fs),
            fmt("rzf", rz)
        ),
    )
}

const STUDY_GRID: [TreeStepParams; 4] = [
    TreeStepParams::new(1, 1, 0),
    TreeStepParams::new(2, 1, 0),
    TreeStepParams::new(1, 1, 1),
    TreeStepParams::new(1, 2, 0),
];

fn study_config(workers: usize) -> SweepConfig {
    SweepConfig {
        n_users: 8,
        n_tx: 8,
        mod_order: 4,
        snr_grid_db: vec![5.0],
        n_channels: 1024,
        n_vectors_per_channel: 64,
        master_seed: 7,
        workers,
        early_abort: None,
        ..Default::default()
    }
}

fn parameter_study(records: &[BerRecord]) -> Outcome {
    let get = |l, v, k| {
        let r = records
            .iter()
            .find(|r| (r.l, r.v, r.k) == (l, v, k))
            .expect("tuple present");
        (r.bit_errors, r.bits_total)
    };
    let base = get(1, 1, 0);
    let depth = get(2, 1, 0);
    let restart = get(1, 1, 1);
    let width = get(1, 2, 0);
    let ber = |e: (u64, u64)| e.0 as f64 / e.1 as f64;
    let passed = ber(depth) <= ber(base) && ber(restart) <= ber(base) && intervals_overlap(width, base);
    outcome(
        passed,
        format!(
            "BER (1,1,0) {:.3e}, (2,1,0) {:.3e}, (1,1,1) {:.3e}, (1,2,0) {:.3e}; {} bits each",
            ber(base),
            ber(depth),
            ber(restart),
            ber(width),
            base.1
        ),
    )
}

fn complexity_accounting() -> Outcome {
    let mut count_misses = 0;
    let mut checked = 0;
    for seed in 0..20u64 {
        let p = random_problem(8, 8, 4, 80_000 + seed);
        for params in DEFAULT_PARAM_GRID {
            let expected = (params.k as u64 + 1) * (2 * params.v as u64 + 1).pow(params.l) + 1;
            let out = treestep_solve(&p, &params, &mut RngStream::derive(8, &[seed])).unwrap();
            checked += 1;
            if out.candidates_evaluated != expected {
                count_misses += 1;
            }
        }
    }
    let s2 = complexity_exponent(2, 8).unwrap();
    let s1 = complexity_exponent(1, 8).unwrap();
    let slopes_ok = (s2 - 3.0).abs() <= 0.3 && (s1 - 3.0).abs() <= 0.3;
    outcome(
        count_misses == 0 && slopes_ok,
        format!(
            "{count_misses}/{checked} candidate-count mismatches; slope {s2:.3} at n_tx = 2 n_users, {s1:.3} at n_tx = n_users"
        ),
    )
}

fn main() -> ExitCode {
    let mut suite = Suite { failures: 0 };
    let secs = Duration::from_secs;

    suite.run("C1", "degenerate TreeStep equals oracle", Some(secs(10)), oracle_equivalence);
    suite.run("C2", "local minimization closed form", Some(secs(1)), local_minimization);
    suite.run("C3", "complex/real transform fidelity", Some(secs(1)), transform_fidelity);
    suite.run("C4", "never worse than ZF", Some(secs(30)), never_worse_than_zf);
    suite.run("C5", "noiseless BER is zero", Some(secs(10)), noiseless_zero_ber);

    let mut ordering = Vec::new();
    suite.run("C6", "scaled BER ordering", Some(secs(300)), || {
        ordering = run_sweep(&ordering_config(8)).unwrap();
        ber_ordering(&ordering)
    });
    let mut study = Vec::new();
    suite.run("C7", "parameter study trends", Some(secs(600)), || {
        study = run_param_study(&study_config(8), &STUDY_GRID).unwrap();
        parameter_study(&study)
    });
    suite.run("C8", "complexity accounting", Some(secs(60)), complexity_accounting);
    suite.run("C9", "worker-count determinism", None, || {
        let mut eight = render(&ordering, OutputFormat::Csv).unwrap();
        eight.extend(render(&study, OutputFormat::Csv).unwrap());
        let mut one = render(&run_sweep(&ordering_config(1)).unwrap(), OutputFormat::Csv).unwrap();
        one.extend(render(&run_param_study(&study_config(1), &STUDY_GRID).unwrap(), OutputFormat::Csv).unwrap());
        outcome(one == eight, format!("{} CSV bytes compared between 1 and 8 workers", eight.len()))
    });

    if suite.failures == 0 {
        println!("all 9 acceptance criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("{} of 9 acceptance criteria failed", suite.failures);
        ExitCode::FAILURE
    }
}
