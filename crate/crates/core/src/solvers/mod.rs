//! Perturbation search: TreeStep, the fixed-complexity sphere encoder
//! baseline and an exhaustive oracle for small instances.

mod exhaustive;
mod fse;
mod local_min;
mod treestep;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::precoding::{objective, PerturbationVector, VppProblem};

pub use exhaustive::{exhaustive_solve, exhaustive_solve_with_cap};
pub use fse::{fse_candidates, fse_solve, FseSelection};
pub use local_min::{local_min_dim, local_min_dim_with, LocalMinResult, Rounding};
pub use treestep::{
    full_expansion, full_expansion_with_cap, single_expansion, single_expansion_traced,
    treestep_solve, ExpansionTrace, FixStep, PartialPerturbation, TreeStep,
};

/// Largest full-expansion tree, `(2V+1)^L`, accepted by default.
pub const DEFAULT_FULL_EXPANSION_CAP: u128 = 729;

/// Largest grid, `(2V+1)^(2 n_users)`, the exhaustive oracle scans by default.
pub const DEFAULT_EXHAUSTIVE_CAP: u128 = 59_049;

/// TreeStep knobs.
///
/// * `l`: number of leading real dimensions expanded exhaustively
/// * `v`: expansion range `[-v, v]`
/// * `k`: random-restart repetitions per full-expansion leaf
/// * `b`: random restart range `[-b, b]`, `b <= v`
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeStepParams {
    pub l: u32,
    pub v: u32,
    pub k: u32,
    pub b: u32,
}

impl TreeStepParams {
    /// Restart range defaults to `b = v`.
    pub const fn new(l: u32, v: u32, k: u32) -> Self {
        Self { l, v, k, b: v }
    }

    pub fn validate(&self, n_users: usize) -> Result<()> {
        if self.l as usize > 2 * n_users {
            return Err(Error::InvalidParams(format!(
                "L = {} exceeds the {} real dimensions",
                self.l,
                2 * n_users
            )));
        }
        if self.v < 1 {
            return Err(Error::InvalidParams("V must be >= 1".into()));
        }
        if self.b > self.v {
            return Err(Error::InvalidParams(format!("B = {} exceeds V = {}", self.b, self.v)));
        }
        Ok(())
    }

    /// `C_f = (K+1)(2V+1)^L`, the number of independent single expansions.
    pub fn complexity_factor(&self) -> u128 {
        (self.k as u128 + 1) * (2 * self.v as u128 + 1).pow(self.l)
    }
}

impl Default for TreeStepParams {
    fn default() -> Self {
        Self::new(1, 1, 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub v_hat: PerturbationVector,
    /// L-∞ objective of `v_hat`.
    pub objective: f64,
    pub candidates_evaluated: u64,
    /// Complex multiply-adds spent in the search.
    pub op_counter: u64,
}

/// Argmin by objective; equal objectives go to the lexicographically
/// smallest vector. Objectives are recomputed from scratch for every
/// candidate so solvers agree bit-for-bit on the same vector.
pub(crate) fn select_best<I>(p: &VppProblem, pool: I) -> Result<(PerturbationVector, f64)>
where
    I: IntoIterator<Item = PerturbationVector>,
{
    let mut best: Option<(PerturbationVector, f64)> = None;
    for cand in pool {
        let obj = objective(p, &cand)?;
        let better = match &best {
            None => true,
            Some((bv, bo)) => obj < *bo || (obj == *bo && cand < *bv),
        };
        if better {
            best = Some((cand, obj));
        }
    }
    best.ok_or_else(|| Error::InvalidParams("empty candidate pool".into()))
}

/// `base^exp`, or `None` on overflow.
pub(crate) fn checked_pow(base: u128, exp: usize) -> Option<u128> {
    (0..exp).try_fold(1u128, |acc, _| acc.checked_mul(base))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complexity_factor_arithmetic() {
        assert_eq!(TreeStepParams::new(1, 1, 0).complexity_factor(), 3);
        assert_eq!(TreeStepParams::new(2, 1, 0).complexity_factor(), 9);
        assert_eq!(TreeStepParams::new(1, 2, 0).complexity_factor(), 5);
        assert_eq!(TreeStepParams::new(1, 1, 1).complexity_factor(), 6);
        assert_eq!(TreeStepParams::new(0, 1, 3).complexity_factor(), 4);
    }

    #[test]
    fn param_validation() {
        assert!(TreeStepParams::new(4, 1, 0).validate(2).is_ok());
        assert!(TreeStepParams::new(5, 1, 0).validate(2).is_err());
        assert!(TreeStepParams::new(1, 0, 0).validate(2).is_err());
        let p = TreeStepParams { l: 1, v: 1, k: 1, b: 2 };
        assert!(p.validate(2).is_err());
    }
}
