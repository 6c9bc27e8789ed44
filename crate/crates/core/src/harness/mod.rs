//! Monte-Carlo BER engine: configuration, per-trial link simulation,
//! sweeps, result files and the self-verification suite.

mod output;
pub mod stats;
mod sweep;
mod trial;
mod verify;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solvers::TreeStepParams;

pub use output::{emit_results, parse_csv, read_csv, render, OutputFormat};
pub use sweep::{run_param_study, run_sweep, DEFAULT_PARAM_GRID};
pub use trial::{run_trial, TrialOutcome, TrialRunner};
pub use verify::{
    complexity_exponent, verify_suite, verify_suite_with, CheckResult, VerifyOptions, VerifyReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PrecoderTag {
    #[serde(rename = "zf")]
    Zf,
    #[serde(rename = "rzf")]
    Rzf,
    #[serde(rename = "fse")]
    Fse,
    #[serde(rename = "fse_mod")]
    FseMod,
    #[serde(rename = "treestep")]
    TreeStep,
    #[serde(rename = "oracle")]
    Oracle,
}

impl PrecoderTag {
    pub const ALL: [PrecoderTag; 6] = [
        PrecoderTag::Zf,
        PrecoderTag::Rzf,
        PrecoderTag::Fse,
        PrecoderTag::FseMod,
        PrecoderTag::TreeStep,
        PrecoderTag::Oracle,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PrecoderTag::Zf => "zf",
            PrecoderTag::Rzf => "rzf",
            PrecoderTag::Fse => "fse",
            PrecoderTag::FseMod => "fse_mod",
            PrecoderTag::TreeStep => "treestep",
            PrecoderTag::Oracle => "oracle",
        }
    }

    /// Whether the precoder sends a perturbation (and the receiver folds).
    pub fn is_vpp(self) -> bool {
        !matches!(self, PrecoderTag::Zf | PrecoderTag::Rzf)
    }
}

impl fmt::Display for PrecoderTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PrecoderTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PrecoderTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s.trim())
            .ok_or_else(|| Error::InvalidParams(format!("unknown precoder '{s}'")))
    }
}

/// Linear precoder that the VPP searches perturb. ZF unless configured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VppBase {
    #[default]
    Zf,
    Rzf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub n_users: usize,
    pub n_tx: usize,
    pub mod_order: usize,
    pub snr_grid_db: Vec<f64>,
    pub precoders: Vec<PrecoderTag>,
    pub treestep_params: TreeStepParams,
    pub fse_v: u32,
    pub oracle_v: u32,
    pub n_channels: usize,
    pub n_vectors_per_channel: usize,
    pub master_seed: u64,
    pub power: f64,
    /// Worker threads; 0 lets rayon decide.
    pub workers: usize,
    /// Stop a cell once this many bit errors have accumulated.
    pub early_abort: Option<u64>,
    pub vpp_base: VppBase,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            n_users: 8,
            n_tx: 8,
            mod_order: 4,
            snr_grid_db: vec![0.0, 5.0, 10.0, 15.0],
            precoders: vec![
                PrecoderTag::Rzf,
                PrecoderTag::Fse,
                PrecoderTag::FseMod,
                PrecoderTag::TreeStep,
            ],
            treestep_params: TreeStepParams::default(),
            fse_v: 1,
            oracle_v: 1,
            n_channels: 128,
            n_vectors_per_channel: 128,
            master_seed: 0,
            power: 1.0,
            workers: 0,
            early_abort: Some(2000),
            vpp_base: VppBase::Zf,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_users == 0 || self.n_tx < self.n_users {
            return Err(Error::InvalidParams(format!(
                "need n_tx >= n_users >= 1, got nt={} nu={}",
                self.n_tx, self.n_users
            )));
        }
        if !matches!(self.mod_order, 4 | 16 | 64) {
            return Err(Error::UnsupportedOrder(self.mod_order));
        }
        if self.snr_grid_db.is_empty() || self.precoders.is_empty() {
            return Err(Error::InvalidParams("SNR grid and precoder list must be nonempty".into()));
        }
        if self.snr_grid_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidParams("SNR values must be finite".into()));
        }
        if self.n_channels == 0 || self.n_vectors_per_channel == 0 {
            return Err(Error::InvalidParams("channel and vector counts must be >= 1".into()));
        }
        if self.power <= 0.0 || !self.power.is_finite() {
            return Err(Error::InvalidParams(format!("power must be positive, got {}", self.power)));
        }
        if self.precoders.contains(&PrecoderTag::TreeStep) {
            self.treestep_params.validate(self.n_users)?;
        }
        if self.fse_v == 0 || self.oracle_v == 0 {
            return Err(Error::InvalidParams("FSE and oracle V must be >= 1".into()));
        }
        Ok(())
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.mod_order.trailing_zeros() as usize
    }

    /// `(L, V, K, C_f)` reported for a precoder. Every precoder is described
    /// as `C_f = (K+1)(2V+1)^L` candidates: FSE expands one complex (two
    /// real) dimension, the oracle all of them, linear precoders none.
    pub fn search_shape(&self, precoder: PrecoderTag) -> (u32, u32, u32, u64) {
        let (l, v, k) = match precoder {
            PrecoderTag::Zf | PrecoderTag::Rzf => (0, 0, 0),
            PrecoderTag::Fse | PrecoderTag::FseMod => (2, self.fse_v, 0),
            PrecoderTag::TreeStep => {
                let p = self.treestep_params;
                (p.l, p.v, p.k)
            }
            PrecoderTag::Oracle => (2 * self.n_users as u32, self.oracle_v, 0),
        };
        let cf = (k as u64 + 1).saturating_mul((2 * v as u64 + 1).saturating_pow(l));
        (l, v, k, cf)
    }
}

/// Aggregated statistics for one (precoder, SNR) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerRecord {
    pub precoder: PrecoderTag,
    pub snr_db: f64,
    pub nt: usize,
    pub nu: usize,
    pub mod_order: usize,
    #[serde(rename = "L")]
    pub l: u32,
    #[serde(rename = "V")]
    pub v: u32,
    #[serde(rename = "K")]
    pub k: u32,
    pub bits_total: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub mean_objective: f64,
    pub complexity_factor: u64,
}
