//! Random instance generators shared by tests, the verification suite and
//! the benchmarks.

use crate::channel::{sample_rayleigh, RngStream};
use crate::constellation::Constellation;
use crate::numerics::{ComplexMatrix, ComplexVector};
use crate::precoding::{zf_precoder, VppProblem};

/// ZF precoder for a Rayleigh channel plus uniformly drawn symbols.
///
/// Returns `(W, u, tau)`. Panics on the (measure-zero) singular channel.
pub fn random_instance(
    n_users: usize,
    n_tx: usize,
    order: usize,
    seed: u64,
) -> (ComplexMatrix, ComplexVector, f64) {
    let c = Constellation::new(order).expect("supported order");
    let mut rng = RngStream::derive(seed, &[0x7e57]);
    let ch = sample_rayleigh(n_users, n_tx, &mut rng).expect("valid dimensions");
    let w = zf_precoder(&ch).expect("full-rank channel").w;
    let u = (0..n_users).map(|_| c.symbol(rng.index_below(order))).collect();
    (w, u, c.tau())
}

pub fn random_problem(n_users: usize, n_tx: usize, order: usize, seed: u64) -> VppProblem {
    let (w, u, tau) = random_instance(n_users, n_tx, order, seed);
    VppProblem::new(&w, &u, tau).expect("consistent dimensions")
}
