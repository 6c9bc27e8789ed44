//! Small-scale run of every library invariant, used by `treestep verify`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{apply_channel, sigma_for_snr, ChannelInstance, RngStream, SnrConfig};
use crate::constellation::Constellation;
use crate::error::Result;
use crate::numerics::{linf_norm, qr_decompose, right_pseudo_inverse, ComplexMatrix, C64};
use crate::precoding::{fold_complex, objective, PerturbationVector, VppProblem};
use crate::solvers::{
    exhaustive_solve, fse_solve, local_min_dim_with, single_expansion_traced, treestep_solve,
    FseSelection, PartialPerturbation, Rounding, TreeStepParams,
};
use crate::testing::{random_instance, random_problem};

use super::stats::ols_slope;
use super::{run_sweep, PrecoderTag, SweepConfig, DEFAULT_PARAM_GRID};

/// Fault-injection knobs; the defaults match the library.
#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    pub rounding: Rounding,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
    /// Fitted exponent of `op_counter / n_tx` against `n_users`.
    pub complexity_exponent: f64,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "[{mark}] {:<32} {}", c.name, c.detail)?;
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        write!(
            f,
            "{passed}/{} checks passed; single-expansion complexity exponent {:.3}",
            self.checks.len(),
            self.complexity_exponent
        )
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    let data = (0..rows * cols)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    ComplexMatrix::from_row_major(rows, cols, data).expect("finite entries")
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> CheckResult {
    match f() {
        Ok((passed, detail)) => CheckResult { name, passed, detail },
        Err(e) => CheckResult {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

/// Slope of `ln(op_counter / n_tx)` against `ln(n_users)` for one
/// depth-1 single expansion at `n_users ∈ {4, 8, 16}` and
/// `n_tx = ratio * n_users`.
pub fn complexity_exponent(ratio: usize, seed: u64) -> Result<f64> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for n_users in [4usize, 8, 16] {
        let n_tx = ratio * n_users;
        let p = random_problem(n_users, n_tx, 4, seed);
        let q = PartialPerturbation { values: vec![0; 2 * n_users], depth: 1 };
        let trace = single_expansion_traced(&p, &q, None, Rounding::HalfAwayFromZero)?;
        xs.push((n_users as f64).ln());
        ys.push((trace.op_counter as f64 / n_tx as f64).ln());
    }
    Ok(ols_slope(&xs, &ys))
}

pub fn verify_suite(seed: u64) -> VerifyReport {
    verify_suite_with(seed, VerifyOptions::default())
}

pub fn verify_suite_with(seed: u64, opts: VerifyOptions) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    checks.push(check("pseudo_inverse_residual", || {
        let mut worst = 0.0f64;
        for draw in 0..100 {
            let nu = 1 + draw % 8;
            let nt = nu + rng.random_range(0..=(16 - nu));
            let h = random_matrix(&mut rng, nu, nt);
            let w = right_pseudo_inverse(&h, 0.0)?;
            worst = worst.max(h.matmul(&w)?.max_abs_diff(&ComplexMatrix::identity(nu)));
        }
        Ok((worst < 1e-10, format!("max |HW - I| = {worst:.2e} over 100 draws")))
    }));

    checks.push(check("qr_residuals", || {
        let mut worst = 0.0f64;
        for draw in 0..100 {
            let n = 1 + draw % 8;
            let m = n + rng.random_range(0..6);
            let a = random_matrix(&mut rng, m, n);
            let (q, r) = qr_decompose(&a)?;
            let ortho = q.hermitian().matmul(&q)?.max_abs_diff(&ComplexMatrix::identity(n));
            let recon = q.matmul(&r)?.max_abs_diff(&a);
            worst = worst.max(ortho).max(recon);
        }
        Ok((worst < 1e-10, format!("max residual {worst:.2e} over 100 draws")))
    }));

    checks.push(check("modulo_fold", || {
        let mut worst = 0.0f64;
        for order in [4, 16, 64] {
            let c = Constellation::new(order)?;
            if c.tau() <= 2.0 * c.c_max() {
                return Ok((false, format!("tau {} <= 2 c_max for order {order}", c.tau())));
            }
            for &s in c.symbols() {
                for gr in -3..=3 {
                    for gi in -3..=3 {
                        let y = s + c.tau() * C64::new(gr as f64, gi as f64);
                        worst = worst.max((c.modulo_tau(y) - s).norm());
                    }
                }
            }
        }
        Ok((worst < 1e-12, format!("max fold error {worst:.2e}")))
    }));

    checks.push(check("demap_round_trip", || {
        let mut bad = 0;
        for order in [4, 16, 64] {
            let c = Constellation::new(order)?;
            for idx in 0..order {
                let bits = c.index_to_bits(idx);
                let (found, found_bits) = c.nearest_symbol(c.bits_to_symbol(&bits)?);
                if found != idx || found_bits != bits {
                    bad += 1;
                }
            }
        }
        Ok((bad == 0, format!("{bad} mismatches over 84 symbols")))
    }));

    checks.push(check("noise_power", || {
        let n_users = 4;
        let ch = ChannelInstance::new(ComplexMatrix::identity(n_users))?;
        let cfg = sigma_for_snr(1.0, 3.0, n_users)?;
        let mut stream = RngStream::derive(seed, &[0x9015e]);
        let x = vec![C64::new(0.0, 0.0); n_users];
        let draws = 100_000;
        let mut total = 0.0;
        for _ in 0..draws {
            total += apply_channel(&ch, &x, &cfg, &mut stream)?.iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
        let rel = (total / draws as f64 / (n_users as f64 * cfg.sigma2) - 1.0).abs();
        Ok((rel < 0.02, format!("E|n|^2 relative error {rel:.4}")))
    }));

    checks.push(check("local_min_closed_form", || {
        let mut value_misses = 0;
        let mut tie_misses = 0;
        let mut skipped = 0;
        let zero = C64::new(0.0, 0.0);
        let draws = 10_000;
        for _ in 0..draws {
            let w = C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            if w.norm() < 1e-3 {
                skipped += 1;
                continue;
            }
            let tau = rng.random_range(0.5..25.0);
            let a = C64::new(rng.random_range(-20.0..20.0), rng.random_range(-20.0..20.0));
            let current = rng.random_range(-5i64..=5);
            // keep the continuous optimum inside the brute-force window
            let centre = -(w.conj() * a).re / (tau * w.norm_sqr());
            if centre.abs() > 49.0 {
                skipped += 1;
                continue;
            }
            let p = VppProblem::new(&ComplexMatrix::from_rows(&[vec![w]])?, &[zero], tau)?;
            let residual = a + tau * w * current as f64;
            let lm = local_min_dim_with(&p, &[residual], 0, 0, current, opts.rounding);
            let best = (-50..=50i64)
                .map(|x| (a + tau * w * x as f64).norm_sqr())
                .fold(f64::INFINITY, f64::min);
            if (lm.f_star - best).abs() > 1e-9 * best.max(1.0) {
                value_misses += 1;
            }
        }
        // exact ties: -β/2α = n + 1/2, co-optima n and n+1
        let p = VppProblem::new(&ComplexMatrix::identity(1), &[zero], 1.0)?;
        let mut ties = 0;
        for n in -20i64..20 {
            let a = C64::new(-(n as f64 + 0.5), 0.0);
            let vals: Vec<(i64, f64)> = (-50..=50i64).map(|x| (x, (a + x as f64).norm_sqr())).collect();
            let best = vals.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
            let expected = vals
                .iter()
                .filter(|v| v.1 == best)
                .map(|v| v.0)
                .max_by_key(|x| x.abs())
                .expect("nonempty");
            let lm = local_min_dim_with(&p, &[a], 0, 0, 0, opts.rounding);
            ties += 1;
            if lm.x_star != expected || lm.f_star != best {
                tie_misses += 1;
            }
        }
        Ok((
            value_misses == 0 && tie_misses == 0,
            format!(
                "{value_misses} value misses in {} draws, {tie_misses}/{ties} tie-rule misses",
                draws - skipped
            ),
        ))
    }));

    checks.push(check("transform_fidelity", || {
        let mut worst = 0.0f64;
        for _ in 0..1000 {
            let nu = rng.random_range(1..=4);
            let nt = nu + rng.random_range(0..=4);
            let w = random_matrix(&mut rng, nt, nu);
            let u: Vec<C64> = (0..nu)
                .map(|_| C64::new(rng.random_range(-7.0..7.0), rng.random_range(-7.0..7.0)))
                .collect();
            let v_hat = PerturbationVector((0..2 * nu).map(|_| rng.random_range(-2..=2)).collect());
            let tau = 4.828_427_124_746_19;
            let p = VppProblem::new(&w, &u, tau)?;
            let vc = fold_complex(&v_hat)?;
            let d: Vec<C64> = u.iter().zip(&vc).map(|(a, b)| a + tau * b).collect();
            let complex_obj = linf_norm(&w.mul_vec(&d)?)?;
            let real_obj = objective(&p, &v_hat)?;
            worst = worst.max((complex_obj - real_obj).abs() / complex_obj.max(f64::MIN_POSITIVE));
        }
        Ok((worst <= 1e-12, format!("max relative gap {worst:.2e} over 1000 draws")))
    }));

    checks.push(check("treestep_degenerate_equals_oracle", || {
        let mut mismatches = 0;
        for i in 0..100u64 {
            let nu = 1 + (i % 2) as usize;
            let p = random_problem(nu, nu, 4, seed.wrapping_add(1000 + i));
            let params = TreeStepParams::new(2 * nu as u32, 1, 0);
            let ts = treestep_solve(&p, &params, &mut RngStream::derive(seed, &[i]))?;
            let ex = exhaustive_solve(&p, 1)?;
            if ts.objective.to_bits() != ex.objective.to_bits() {
                mismatches += 1;
            }
        }
        Ok((mismatches == 0, format!("{mismatches}/100 objective mismatches")))
    }));

    checks.push(check("objective_ordering", || {
        let mut violations = 0;
        let params = TreeStepParams::new(1, 1, 0);
        for i in 0..1000u64 {
            let p = random_problem(2, 2, 4, seed.wrapping_add(5000 + i));
            let zero = objective(&p, &PerturbationVector::zeros(4))?;
            let ts = treestep_solve(&p, &params, &mut RngStream::derive(seed, &[i]))?;
            let ex = exhaustive_solve(&p, 1)?;
            // the oracle box only bounds solutions it could have found
            let in_box = ts.v_hat.as_slice().iter().all(|x| x.abs() <= 1);
            if ts.objective > zero || (in_box && ex.objective > ts.objective) {
                violations += 1;
            }
        }
        Ok((violations == 0, format!("{violations}/1000 violations of oracle <= treestep <= zero")))
    }));

    checks.push(check("fse_linf_dominance", || {
        let mut violations = 0;
        for i in 0..200u64 {
            let (w, u, tau) = random_instance(4, 6, 4, seed.wrapping_add(9000 + i));
            let p = VppProblem::new(&w, &u, tau)?;
            let l2 = fse_solve(&p, &w, &u, 1, FseSelection::L2)?;
            let linf = fse_solve(&p, &w, &u, 1, FseSelection::Linf)?;
            if linf.objective > l2.objective {
                violations += 1;
            }
        }
        Ok((violations == 0, format!("{violations}/200 violations")))
    }));

    checks.push(check("candidate_count", || {
        let p = random_problem(4, 4, 4, seed);
        let mut bad = Vec::new();
        for params in DEFAULT_PARAM_GRID {
            let out = treestep_solve(&p, &params, &mut RngStream::derive(seed, &[7]))?;
            if out.candidates_evaluated as u128 != params.complexity_factor() + 1 {
                bad.push((params.l, params.v, params.k));
            }
        }
        Ok((bad.is_empty(), format!("{} tuples checked, mismatches {bad:?}", DEFAULT_PARAM_GRID.len())))
    }));

    let mut exponent = f64::NAN;
    checks.push(check("complexity_exponent", || {
        exponent = complexity_exponent(2, seed)?;
        Ok(((exponent - 3.0).abs() <= 0.3, format!("slope {exponent:.3} (target 3.0 +/- 0.3)")))
    }));

    checks.push(check("noiseless_zero_ber", || {
        let cfg = SweepConfig { n_users: 2, n_tx: 2, ..Default::default() };
        let snr = SnrConfig::noiseless(1.0, 2);
        let mut errors = 0;
        for tag in [PrecoderTag::TreeStep, PrecoderTag::Fse, PrecoderTag::FseMod, PrecoderTag::Oracle] {
            for t in 0..100u64 {
                let ch = crate::channel::sample_rayleigh(2, 2, &mut RngStream::derive(seed, &[1, t]))?;
                let out = super::run_trial(&cfg, tag, &ch, &snr, &mut RngStream::derive(seed, &[2, t]))?;
                errors += out.bit_errors;
            }
        }
        Ok((errors == 0, format!("{errors} bit errors over 400 noiseless trials")))
    }));

    checks.push(check("sweep_determinism", || {
        let mut cfg = SweepConfig {
            n_users: 4,
            n_tx: 4,
            snr_grid_db: vec![0.0, 8.0],
            precoders: vec![PrecoderTag::Rzf, PrecoderTag::FseMod, PrecoderTag::TreeStep],
            n_channels: 24,
            n_vectors_per_channel: 4,
            master_seed: seed,
            workers: 1,
            early_abort: None,
            ..Default::default()
        };
        let one = run_sweep(&cfg)?;
        cfg.workers = 4;
        let four = run_sweep(&cfg)?;
        Ok((one == four, format!("{} records compared across 1 and 4 workers", one.len())))
    }));

    VerifyReport {
        checks,
        complexity_exponent: exponent,
    }
}
