//! Linear precoders, the real-valued VPP reformulation and its L-∞ objective.
//!
//! A complex perturbation `v` is represented by the stacked integer vector
//! `v̂ = [Re v; Im v]`. The matching precoder `Ŵ = [W, iW]` maps
//! `û + τv̂` to the same antenna signals as `W (u + τv)`.

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelInstance, SnrConfig};
use crate::error::{Error, Result};
use crate::numerics::{linf_norm, right_pseudo_inverse, ComplexMatrix, ComplexVector, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PrecoderKind {
    Zf,
    Rzf,
}

#[derive(Debug, Clone)]
pub struct PrecodingMatrix {
    pub w: ComplexMatrix,
    pub kind: PrecoderKind,
}

impl PrecodingMatrix {
    pub fn n_tx(&self) -> usize {
        self.w.rows()
    }

    pub fn n_users(&self) -> usize {
        self.w.cols()
    }
}

/// `W = Hᴴ (H Hᴴ)⁻¹`.
pub fn zf_precoder(ch: &ChannelInstance) -> Result<PrecodingMatrix> {
    Ok(PrecodingMatrix {
        w: right_pseudo_inverse(&ch.h, 0.0)?,
        kind: PrecoderKind::Zf,
    })
}

/// Regularization used by [`rzf_precoder`]: `n_users / rho`.
pub fn rzf_ridge(cfg: &SnrConfig) -> f64 {
    cfg.n_users as f64 / cfg.rho
}

/// `W = Hᴴ (H Hᴴ + α I)⁻¹` with `α = n_users / rho`.
pub fn rzf_precoder(ch: &ChannelInstance, cfg: &SnrConfig) -> Result<PrecodingMatrix> {
    rzf_precoder_with_ridge(ch, rzf_ridge(cfg))
}

pub fn rzf_precoder_with_ridge(ch: &ChannelInstance, ridge: f64) -> Result<PrecodingMatrix> {
    Ok(PrecodingMatrix {
        w: right_pseudo_inverse(&ch.h, ridge)?,
        kind: PrecoderKind::Rzf,
    })
}

/// Integer perturbation in stacked real form, length `2 * n_users`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PerturbationVector(pub Vec<i64>);

impl PerturbationVector {
    pub fn zeros(len: usize) -> Self {
        Self(vec![0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    /// Stacks a Gaussian-integer vector as `[Re v; Im v]`.
    pub fn from_gaussian(v: &[(i64, i64)]) -> Self {
        Self(v.iter().map(|g| g.0).chain(v.iter().map(|g| g.1)).collect())
    }
}

/// `v_k = v̂_k + i v̂_{k+n}`.
pub fn fold_complex(v_hat: &PerturbationVector) -> Result<ComplexVector> {
    if !v_hat.len().is_multiple_of(2) {
        return Err(Error::OddLength(v_hat.len()));
    }
    let n = v_hat.len() / 2;
    Ok((0..n)
        .map(|k| C64::new(v_hat.0[k] as f64, v_hat.0[k + n] as f64))
        .collect())
}

/// Real-transformed VPP instance shared read-only by all solvers.
#[derive(Debug, Clone)]
pub struct VppProblem {
    w_hat: ComplexMatrix,
    // Column-major copy of `w_hat`; solvers walk columns.
    w_hat_cols: Vec<C64>,
    u_hat: Vec<f64>,
    tau: f64,
    n_tx: usize,
    n_users: usize,
}

impl VppProblem {
    pub fn new(w: &ComplexMatrix, u: &[C64], tau: f64) -> Result<Self> {
        let (n_tx, n_users) = (w.rows(), w.cols());
        if u.len() != n_users {
            return Err(Error::DimensionMismatch(format!(
                "{n_users} precoder columns but {} symbols",
                u.len()
            )));
        }
        if tau <= 0.0 || !tau.is_finite() {
            return Err(Error::InvalidParams(format!("tau must be positive, got {tau}")));
        }
        let mut w_hat = ComplexMatrix::zeros(n_tx, 2 * n_users);
        for i in 0..n_tx {
            for j in 0..n_users {
                let z = w[(i, j)];
                w_hat[(i, j)] = z;
                w_hat[(i, j + n_users)] = C64::new(-z.im, z.re);
            }
        }
        let w_hat_cols = (0..2 * n_users)
            .flat_map(|j| (0..n_tx).map(move |i| (i, j)))
            .map(|(i, j)| w_hat[(i, j)])
            .collect();
        let u_hat = u.iter().map(|z| z.re).chain(u.iter().map(|z| z.im)).collect();
        Ok(Self {
            w_hat,
            w_hat_cols,
            u_hat,
            tau,
            n_tx,
            n_users,
        })
    }

    pub fn w_hat(&self) -> &ComplexMatrix {
        &self.w_hat
    }

    /// Column `j` of `Ŵ`, one entry per antenna.
    pub fn column(&self, j: usize) -> &[C64] {
        &self.w_hat_cols[j * self.n_tx..(j + 1) * self.n_tx]
    }

    pub fn u_hat(&self) -> &[f64] {
        &self.u_hat
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    /// Length of `v̂`.
    pub fn dims(&self) -> usize {
        2 * self.n_users
    }

    fn check_len(&self, v_hat: &PerturbationVector) -> Result<()> {
        if v_hat.len() != self.dims() {
            return Err(Error::DimensionMismatch(format!(
                "perturbation of length {} for a problem with {} dims",
                v_hat.len(),
                self.dims()
            )));
        }
        Ok(())
    }

    /// `Ŵ (û + τ v̂)`, the per-antenna signals before normalization.
    pub fn precoded(&self, v_hat: &PerturbationVector) -> Result<ComplexVector> {
        self.check_len(v_hat)?;
        let d: Vec<f64> = self
            .u_hat
            .iter()
            .zip(&v_hat.0)
            .map(|(u, &v)| u + self.tau * v as f64)
            .collect();
        Ok((0..self.n_tx)
            .map(|i| self.w_hat.row(i).iter().zip(&d).map(|(w, dj)| w * dj).sum())
            .collect())
    }
}

pub fn make_vpp_problem(w: &PrecodingMatrix, u: &[C64], tau: f64) -> Result<VppProblem> {
    VppProblem::new(&w.w, u, tau)
}

/// Amplitude of the loudest antenna, `‖Ŵ(û + τv̂)‖∞`.
pub fn objective(p: &VppProblem, v_hat: &PerturbationVector) -> Result<f64> {
    linf_norm(&p.precoded(v_hat)?)
}

/// Per-antenna normalized transmit vector `x = √P · d / ‖d‖∞` and the
/// scale `γ = ‖d‖∞` the receiver has to undo.
pub fn transmit_vector(
    p: &VppProblem,
    v_hat: &PerturbationVector,
    power: f64,
) -> Result<(ComplexVector, f64)> {
    let d = p.precoded(v_hat)?;
    let gamma = linf_norm(&d)?;
    if gamma == 0.0 {
        return Err(Error::ZeroObjective);
    }
    let s = power.sqrt() / gamma;
    Ok((d.into_iter().map(|z| z * s).collect(), gamma))
}
