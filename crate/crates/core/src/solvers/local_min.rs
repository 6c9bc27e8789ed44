use crate::numerics::C64;
use crate::precoding::VppProblem;

/// Rounding rule for the closed-form minimizer. Only `HalfAwayFromZero` is
/// used by the solvers; the other exists so the verification suite can
/// confirm it notices a different tie rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rounding {
    #[default]
    HalfAwayFromZero,
    HalfToEven,
}

impl Rounding {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Rounding::HalfAwayFromZero => x.round(),
            Rounding::HalfToEven => x.round_ties_even(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalMinResult {
    pub x_star: i64,
    /// `α x*² + β x* + γ`, the minimized power of the chosen antenna.
    pub f_star: f64,
    /// Loudest-antenna amplitude after setting dimension `j` to `x_star`.
    pub p_value: f64,
}

/// Minimizes the power of antenna `i` over integer values of dimension `j`.
///
/// `residual` must equal `Ŵ(û + τv̂)` for the caller's current `v̂`, whose
/// `j`-th entry is `current_j`. Writing `a = r_i - τ Ŵ_ij current_j`, the
/// power is `|a + τ Ŵ_ij x|² = α x² + β x + γ` with `α = τ²|Ŵ_ij|²`,
/// `β = 2τ Re(conj(Ŵ_ij) a)` and `γ = |a|²`.
pub fn local_min_dim(
    p: &VppProblem,
    residual: &[C64],
    antenna_i: usize,
    dim_j: usize,
    current_j: i64,
) -> LocalMinResult {
    local_min_dim_with(p, residual, antenna_i, dim_j, current_j, Rounding::HalfAwayFromZero)
}

pub fn local_min_dim_with(
    p: &VppProblem,
    residual: &[C64],
    antenna_i: usize,
    dim_j: usize,
    current_j: i64,
    rounding: Rounding,
) -> LocalMinResult {
    let tau = p.tau();
    let col = p.column(dim_j);
    let w = col[antenna_i];
    let r_i = residual[antenna_i];

    let alpha = tau * tau * w.norm_sqr();
    if alpha == 0.0 {
        // No leverage: keep the current value.
        return LocalMinResult {
            x_star: current_j,
            f_star: r_i.norm_sqr(),
            p_value: residual.iter().map(|z| z.norm()).fold(0.0, f64::max),
        };
    }
    let a = r_i - tau * current_j as f64 * w;
    let beta = 2.0 * tau * (w.conj() * a).re;
    let gamma = a.norm_sqr();
    let x_star = rounding.apply(-beta / (2.0 * alpha)) as i64;
    let x = x_star as f64;
    let f_star = alpha * x * x + beta * x + gamma;
    LocalMinResult {
        x_star,
        f_star,
        p_value: shifted_peak(residual, col, tau * (x_star - current_j) as f64),
    }
}

/// `max_k |r_k + shift · col_k|`.
pub(crate) fn shifted_peak(residual: &[C64], col: &[C64], shift: f64) -> f64 {
    residual
        .iter()
        .zip(col)
        .map(|(r, w)| (r + w * shift).norm_sqr())
        .fold(0.0, f64::max)
        .sqrt()
}
