//! Rayleigh channels, AWGN and SNR bookkeeping.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, ComplexVector, C64};

/// Deterministic random stream.
///
/// Streams are derived from a master seed and a key path, so any trial can
/// regenerate its randomness without knowing what other workers consumed.
#[derive(Debug, Clone)]
pub struct RngStream {
    inner: ChaCha8Rng,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn from_seed(seed: u64) -> Self {
        Self::derive(seed, &[])
    }

    /// Stream keyed by `(master, keys...)`. Each key is absorbed through a
    /// splitmix64 step; the final state expands into the 256-bit ChaCha seed.
    pub fn derive(master: u64, keys: &[u64]) -> Self {
        let mut state = master;
        let mut acc = splitmix64(&mut state);
        for &k in keys {
            state ^= k.wrapping_mul(0xD6E8_FEB8_6659_FD93) ^ acc;
            acc = splitmix64(&mut state);
        }
        let mut seed = [0u8; 32];
        for chunk in seed.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        Self {
            inner: ChaCha8Rng::from_seed(seed),
        }
    }

    /// Child stream seeded from this one; consumes one `u64`.
    pub fn fork(&mut self) -> Self {
        let s = self.inner.next_u64();
        Self::derive(s, &[])
    }

    /// Circularly-symmetric complex Gaussian with total variance `variance`.
    pub fn complex_gaussian(&mut self, variance: f64) -> C64 {
        let s = (variance / 2.0).sqrt();
        let re: f64 = self.inner.sample(StandardNormal);
        let im: f64 = self.inner.sample(StandardNormal);
        C64::new(s * re, s * im)
    }

    /// Uniform integer in `[lo, hi]`.
    pub fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
        self.inner.random_range(lo..=hi)
    }

    pub fn index_below(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Noise level for one SNR point. `rho = P / (n_users * sigma2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrConfig {
    pub power: f64,
    pub rho: f64,
    pub sigma2: f64,
    pub n_users: usize,
}

impl SnrConfig {
    /// Noiseless configuration (`rho = ∞`).
    pub fn noiseless(power: f64, n_users: usize) -> Self {
        Self {
            power,
            rho: f64::INFINITY,
            sigma2: 0.0,
            n_users,
        }
    }
}

/// Per-user complex noise variance for a given SNR in dB, with
/// `E‖n‖² = n_users · σ²`.
pub fn sigma_for_snr(power: f64, rho_db: f64, n_users: usize) -> Result<SnrConfig> {
    if power <= 0.0 || !power.is_finite() {
        return Err(Error::InvalidParams(format!("power must be positive, got {power}")));
    }
    if n_users == 0 {
        return Err(Error::InvalidDimensions("n_users must be >= 1".into()));
    }
    let rho = 10f64.powf(rho_db / 10.0);
    Ok(SnrConfig {
        power,
        rho,
        sigma2: power / (rho * n_users as f64),
        n_users,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelInstance {
    pub h: ComplexMatrix,
}

impl ChannelInstance {
    pub fn new(h: ComplexMatrix) -> Result<Self> {
        if h.rows() == 0 || h.cols() < h.rows() {
            return Err(Error::InvalidDimensions(format!(
                "channel must be n_users x n_tx with n_tx >= n_users >= 1, got {}x{}",
                h.rows(),
                h.cols()
            )));
        }
        Ok(Self { h })
    }

    pub fn n_users(&self) -> usize {
        self.h.rows()
    }

    pub fn n_tx(&self) -> usize {
        self.h.cols()
    }
}

/// I.i.d. CN(0, 1) channel matrix of shape `n_users x n_tx`.
pub fn sample_rayleigh(n_users: usize, n_tx: usize, rng: &mut RngStream) -> Result<ChannelInstance> {
    if n_users == 0 || n_tx < n_users {
        return Err(Error::InvalidDimensions(format!(
            "need n_tx >= n_users >= 1, got n_users={n_users}, n_tx={n_tx}"
        )));
    }
    let data = (0..n_users * n_tx).map(|_| rng.complex_gaussian(1.0)).collect();
    ChannelInstance::new(ComplexMatrix::from_row_major(n_users, n_tx, data)?)
}

/// `y = H x + n` with `n ~ CN(0, σ² I)`. No randomness is drawn when σ² is 0.
pub fn apply_channel(
    ch: &ChannelInstance,
    x: &[C64],
    cfg: &SnrConfig,
    rng: &mut RngStream,
) -> Result<ComplexVector> {
    let mut y = ch.h.mul_vec(x)?;
    if cfg.sigma2 > 0.0 {
        for yi in &mut y {
            *yi += rng.complex_gaussian(cfg.sigma2);
        }
    }
    Ok(y)
}
