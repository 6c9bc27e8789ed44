use crate::error::{Error, Result};
use crate::precoding::{objective, PerturbationVector, VppProblem};

use super::{checked_pow, SolveOutcome, DEFAULT_EXHAUSTIVE_CAP};

/// Global minimizer over `[-v, v]^(2 n_users)`.
pub fn exhaustive_solve(p: &VppProblem, v: u32) -> Result<SolveOutcome> {
    exhaustive_solve_with_cap(p, v, DEFAULT_EXHAUSTIVE_CAP)
}

/// Scans the grid in lexicographic order; the first vector reaching the
/// minimum wins, which is the lexicographically smallest minimizer.
pub fn exhaustive_solve_with_cap(p: &VppProblem, v: u32, cap: u128) -> Result<SolveOutcome> {
    let dims = p.dims();
    let size = checked_pow(2 * v as u128 + 1, dims).unwrap_or(u128::MAX);
    if size > cap {
        return Err(Error::SearchSpaceTooLarge { size, cap });
    }
    let v = v as i64;
    let mut cur = PerturbationVector(vec![-v; dims]);
    let mut best = cur.clone();
    let mut best_obj = f64::INFINITY;
    let mut evaluated = 0u64;
    loop {
        let obj = objective(p, &cur)?;
        evaluated += 1;
        if obj < best_obj {
            best_obj = obj;
            best.clone_from(&cur);
        }
        let mut pos = dims;
        loop {
            if pos == 0 {
                return Ok(SolveOutcome {
                    v_hat: best,
                    objective: best_obj,
                    candidates_evaluated: evaluated,
                    op_counter: evaluated * (p.n_tx() * dims) as u64,
                });
            }
            pos -= 1;
            if cur.0[pos] < v {
                cur.0[pos] += 1;
                break;
            }
            cur.0[pos] = -v;
        }
    }
}
