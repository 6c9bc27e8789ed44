use crate::error::{Error, Result};
use crate::numerics::{l2_norm, qr_decompose, ComplexMatrix, C64};
use crate::precoding::{objective, PerturbationVector, VppProblem};

use super::SolveOutcome;

/// Criterion used to pick among the sphere-encoder candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FseSelection {
    /// Total-power criterion `‖R(u + τv)‖₂` (conventional FSE).
    L2,
    /// Per-antenna criterion `‖W(u + τv)‖∞` (modified FSE).
    Linf,
}

fn round_gaussian(z: C64) -> (i64, i64) {
    (z.re.round() as i64, z.im.round() as i64)
}

/// Candidate set of the fixed-complexity sphere encoder.
///
/// With `W = QR`, the last user's perturbation runs over all Gaussian
/// integers in `[-v, v]²`; every earlier user is then set by successive
/// interference cancellation through `R`, from user `n-2` down to user 0.
pub fn fse_candidates(w: &ComplexMatrix, u: &[C64], tau: f64, v: u32) -> Result<Vec<PerturbationVector>> {
    let n = w.cols();
    if u.len() != n {
        return Err(Error::DimensionMismatch(format!("{n} precoder columns, {} symbols", u.len())));
    }
    if n == 0 {
        return Err(Error::InvalidDimensions("no users".into()));
    }
    let (_, r) = qr_decompose(w)?;
    let v = v as i64;
    let mut out = Vec::with_capacity(((2 * v + 1) * (2 * v + 1)) as usize);
    for re in -v..=v {
        for im in -v..=v {
            let mut g = vec![(0i64, 0i64); n];
            g[n - 1] = (re, im);
            // d_m = u_m + τ v_m for already-decided users
            let mut d = vec![C64::new(0.0, 0.0); n];
            d[n - 1] = u[n - 1] + tau * C64::new(re as f64, im as f64);
            for k in (0..n - 1).rev() {
                let interference: C64 = (k + 1..n).map(|m| r[(k, m)] * d[m]).sum();
                let target = (u[k] + interference / r[(k, k)]) / tau;
                let (gr, gi) = round_gaussian(target);
                g[k] = (-gr, -gi);
                d[k] = u[k] + tau * C64::new(g[k].0 as f64, g[k].1 as f64);
            }
            out.push(PerturbationVector::from_gaussian(&g));
        }
    }
    Ok(out)
}

/// Fixed-complexity sphere encoder with either selection criterion. The
/// returned objective is always the per-antenna one, since that is what
/// the transmitter normalizes by.
pub fn fse_solve(
    p: &VppProblem,
    w: &ComplexMatrix,
    u: &[C64],
    v: u32,
    selection: FseSelection,
) -> Result<SolveOutcome> {
    if w.rows() != p.n_tx() || w.cols() != p.n_users() {
        return Err(Error::DimensionMismatch(format!(
            "precoder is {}x{} but problem is {}x{}",
            w.rows(),
            w.cols(),
            p.n_tx(),
            p.n_users()
        )));
    }
    let tau = p.tau();
    let candidates = fse_candidates(w, u, tau, v)?;
    let n = p.n_users();
    let (_, r) = qr_decompose(w)?;

    let mut best: Option<(f64, PerturbationVector)> = None;
    for cand in &candidates {
        let metric = match selection {
            FseSelection::L2 => {
                let d: Vec<C64> = u
                    .iter()
                    .enumerate()
                    .map(|(k, uk)| uk + tau * C64::new(cand.0[k] as f64, cand.0[k + n] as f64))
                    .collect();
                l2_norm(&r.mul_vec(&d)?)
            }
            FseSelection::Linf => objective(p, cand)?,
        };
        let better = match &best {
            None => true,
            Some((m, bv)) => metric < *m || (metric == *m && cand < bv),
        };
        if better {
            best = Some((metric, cand.clone()));
        }
    }
    let (_, v_hat) = best.expect("candidate set is never empty");
    let count = candidates.len() as u64;
    Ok(SolveOutcome {
        objective: objective(p, &v_hat)?,
        v_hat,
        candidates_evaluated: count,
        // SIC back-substitution plus one metric evaluation per candidate
        op_counter: count * ((n * (n - 1) / 2 + n) + p.n_tx() * 2 * n) as u64,
    })
}
