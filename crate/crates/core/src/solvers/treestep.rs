use crate::channel::RngStream;
use crate::error::{Error, Result};
use crate::numerics::C64;
use crate::precoding::{PerturbationVector, VppProblem};

use super::local_min::{local_min_dim_with, Rounding};
use super::{checked_pow, select_best, SolveOutcome, TreeStepParams, DEFAULT_FULL_EXPANSION_CAP};

/// Perturbation whose first `depth` dimensions are fixed; the rest hold
/// placeholder zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialPerturbation {
    pub values: Vec<i64>,
    pub depth: usize,
}

impl PartialPerturbation {
    pub fn is_complete(&self) -> bool {
        self.depth == self.values.len()
    }
}

/// One greedy fixing step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixStep {
    pub antenna: usize,
    pub dim: usize,
    pub x_star: i64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionTrace {
    pub v_hat: PerturbationVector,
    pub steps: Vec<FixStep>,
    pub op_counter: u64,
}

pub fn full_expansion(p: &VppProblem, l: usize, v: u32) -> Result<Vec<PartialPerturbation>> {
    full_expansion_with_cap(p, l, v, DEFAULT_FULL_EXPANSION_CAP)
}

/// Every assignment of `[-v, v]` to the first `l` dimensions, in
/// lexicographic order.
pub fn full_expansion_with_cap(
    p: &VppProblem,
    l: usize,
    v: u32,
    cap: u128,
) -> Result<Vec<PartialPerturbation>> {
    let dims = p.dims();
    if l > dims {
        return Err(Error::InvalidParams(format!("L = {l} exceeds {dims} dimensions")));
    }
    let width = 2 * v as u128 + 1;
    let size = checked_pow(width, l).unwrap_or(u128::MAX);
    if size > cap {
        return Err(Error::SearchSpaceTooLarge { size, cap });
    }
    let v = v as i64;
    let mut digits = vec![-v; l];
    let mut out = Vec::with_capacity(size as usize);
    loop {
        let mut values = vec![0; dims];
        values[..l].copy_from_slice(&digits);
        out.push(PartialPerturbation { values, depth: l });

        // odometer, last digit fastest
        let mut pos = l;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            if digits[pos] < v {
                digits[pos] += 1;
                break;
            }
            digits[pos] = -v;
        }
    }
}

/// Greedy completion of `q`: repeatedly fix the unassigned dimension whose
/// per-antenna local minimum gives the quietest loudest antenna.
///
/// `init` supplies starting values for the unassigned dimensions (zeros
/// when absent).
pub fn single_expansion(
    p: &VppProblem,
    q: &PartialPerturbation,
    init: Option<&[i64]>,
) -> Result<PerturbationVector> {
    Ok(single_expansion_traced(p, q, init, Rounding::HalfAwayFromZero)?.v_hat)
}

pub fn single_expansion_traced(
    p: &VppProblem,
    q: &PartialPerturbation,
    init: Option<&[i64]>,
    rounding: Rounding,
) -> Result<ExpansionTrace> {
    let dims = p.dims();
    let n_tx = p.n_tx();
    if q.values.len() != dims || q.depth > dims {
        return Err(Error::DimensionMismatch(format!(
            "partial vector of length {} (depth {}) for {dims} dims",
            q.values.len(),
            q.depth
        )));
    }
    let mut v = q.values.clone();
    if let Some(init) = init {
        if init.len() != dims {
            return Err(Error::DimensionMismatch(format!(
                "init of length {} for {dims} dims",
                init.len()
            )));
        }
        v[q.depth..].copy_from_slice(&init[q.depth..]);
    }

    let tau = p.tau();
    let mut residual: Vec<C64> = p.precoded(&PerturbationVector(v.clone()))?;
    let mut ops = (n_tx * dims) as u64;
    let mut unassigned: Vec<usize> = (q.depth..dims).collect();
    let mut steps = Vec::with_capacity(unassigned.len());

    while !unassigned.is_empty() {
        let mut best: Option<(usize, usize, i64, f64)> = None;
        for i in 0..n_tx {
            for (slot, &j) in unassigned.iter().enumerate() {
                let lm = local_min_dim_with(p, &residual, i, j, v[j], rounding);
                ops += n_tx as u64 + 2;
                if best.is_none_or(|b| lm.p_value < b.3) {
                    best = Some((i, slot, lm.x_star, lm.p_value));
                }
            }
        }
        let (antenna, slot, x_star, p_value) = best.expect("at least one candidate");
        let dim = unassigned.remove(slot);
        let shift = tau * (x_star - v[dim]) as f64;
        if shift != 0.0 {
            for (r, w) in residual.iter_mut().zip(p.column(dim)) {
                *r += w * shift;
            }
        }
        ops += n_tx as u64;
        v[dim] = x_star;
        steps.push(FixStep {
            antenna,
            dim,
            x_star,
            p_value,
        });
    }
    Ok(ExpansionTrace {
        v_hat: PerturbationVector(v),
        steps,
        op_counter: ops,
    })
}

/// TreeStep with an explicit cap on the full-expansion tree.
#[derive(Debug, Clone, Copy)]
pub struct TreeStep {
    pub params: TreeStepParams,
    pub full_expansion_cap: u128,
}

impl TreeStep {
    pub fn new(params: TreeStepParams) -> Self {
        Self {
            params,
            full_expansion_cap: DEFAULT_FULL_EXPANSION_CAP,
        }
    }

    /// Full expansion over the first `L` dims, one greedy completion per leaf
    /// from zeros plus `K` from random starts in `[-B, B]`, and the zero
    /// perturbation; the best of that pool is returned.
    ///
    /// Random starts are drawn leaf by leaf in expansion order, so the result
    /// depends only on `rng`'s state.
    pub fn solve(&self, p: &VppProblem, rng: &mut RngStream) -> Result<SolveOutcome> {
        let params = self.params;
        params.validate(p.n_users())?;
        let leaves = full_expansion_with_cap(p, params.l as usize, params.v, self.full_expansion_cap)?;
        let dims = p.dims();
        let b = params.b as i64;

        let mut pool = Vec::with_capacity(leaves.len() * (params.k as usize + 1) + 1);
        let mut ops = 0u64;
        for leaf in &leaves {
            let trace = single_expansion_traced(p, leaf, None, Rounding::HalfAwayFromZero)?;
            ops += trace.op_counter;
            pool.push(trace.v_hat);
            for _ in 0..params.k {
                let init: Vec<i64> = (0..dims)
                    .map(|d| if d < leaf.depth { 0 } else { rng.int_in(-b, b) })
                    .collect();
                let trace = single_expansion_traced(p, leaf, Some(&init), Rounding::HalfAwayFromZero)?;
                ops += trace.op_counter;
                pool.push(trace.v_hat);
            }
        }
        pool.push(PerturbationVector::zeros(dims));

        let candidates = pool.len() as u64;
        ops += candidates * (p.n_tx() * dims) as u64;
        let (v_hat, objective) = select_best(p, pool)?;
        Ok(SolveOutcome {
            v_hat,
            objective,
            candidates_evaluated: candidates,
            op_counter: ops,
        })
    }
}

pub fn treestep_solve(
    p: &VppProblem,
    params: &TreeStepParams,
    rng: &mut RngStream,
) -> Result<SolveOutcome> {
    TreeStep::new(*params).solve(p, rng)
}
