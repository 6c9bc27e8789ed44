use rayon::prelude::*;

use crate::channel::{sample_rayleigh, sigma_for_snr, RngStream, SnrConfig};
use crate::error::{Error, Result};
use crate::solvers::TreeStepParams;

use super::trial::TrialRunner;
use super::{BerRecord, PrecoderTag, SweepConfig};

/// Key-path tags separating channel draws from per-trial draws.
const CHANNEL_STREAM: u64 = 0xC4A7_0001;
const TRIAL_STREAM: u64 = 0x7121_0002;

/// Channels per batch. Early abort is checked only at batch boundaries, so
/// where a cell stops never depends on the worker count.
const BATCH_CHANNELS: usize = 16;

/// `(L, V, K)` tuples of the depth/width/repetition study.
pub const DEFAULT_PARAM_GRID: [TreeStepParams; 8] = [
    TreeStepParams::new(1, 1, 0),
    TreeStepParams::new(2, 1, 0),
    TreeStepParams::new(3, 1, 0),
    TreeStepParams::new(1, 2, 0),
    TreeStepParams::new(2, 2, 0),
    TreeStepParams::new(1, 1, 1),
    TreeStepParams::new(1, 1, 2),
    TreeStepParams::new(1, 1, 3),
];

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    errors: u64,
    bits: u64,
    trials: u64,
    objective_sum: f64,
}

fn channel_tally(
    cfg: &SweepConfig,
    precoder: PrecoderTag,
    snr: SnrConfig,
    snr_index: usize,
    channel_index: usize,
) -> Result<Tally> {
    let mut ch_rng = RngStream::derive(cfg.master_seed, &[CHANNEL_STREAM, channel_index as u64]);
    let channel = sample_rayleigh(cfg.n_users, cfg.n_tx, &mut ch_rng)?;
    let runner = TrialRunner::new(cfg, precoder, &channel, snr)?;
    let mut tally = Tally::default();
    for vector_index in 0..cfg.n_vectors_per_channel {
        let mut rng = RngStream::derive(
            cfg.master_seed,
            &[TRIAL_STREAM, snr_index as u64, channel_index as u64, vector_index as u64],
        );
        let out = runner.run(&mut rng)?;
        tally.errors += out.bit_errors;
        tally.bits += out.bits;
        tally.trials += 1;
        tally.objective_sum += out.objective;
    }
    Ok(tally)
}

fn run_cell(
    cfg: &SweepConfig,
    precoder: PrecoderTag,
    snr_index: usize,
    snr_db: f64,
) -> Result<BerRecord> {
    let snr = sigma_for_snr(cfg.power, snr_db, cfg.n_users)?;
    let mut total = Tally::default();
    for start in (0..cfg.n_channels).step_by(BATCH_CHANNELS) {
        let end = (start + BATCH_CHANNELS).min(cfg.n_channels);
        let batch: Vec<Result<Tally>> = (start..end)
            .into_par_iter()
            .map(|c| channel_tally(cfg, precoder, snr, snr_index, c))
            .collect();
        // fixed reduction order keeps the float sum reproducible
        for t in batch {
            let t = t?;
            total.errors += t.errors;
            total.bits += t.bits;
            total.trials += t.trials;
            total.objective_sum += t.objective_sum;
        }
        if cfg.early_abort.is_some_and(|limit| total.errors >= limit) {
            break;
        }
    }
    let (l, v, k, complexity_factor) = cfg.search_shape(precoder);
    Ok(BerRecord {
        precoder,
        snr_db,
        nt: cfg.n_tx,
        nu: cfg.n_users,
        mod_order: cfg.mod_order,
        l,
        v,
        k,
        bits_total: total.bits,
        bit_errors: total.errors,
        ber: total.errors as f64 / total.bits as f64,
        mean_objective: total.objective_sum / total.trials as f64,
        complexity_factor,
    })
}

fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParams(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// One record per (precoder, SNR) cell, precoder-major in the configured
/// order. Channels are shared across precoders and SNR points; each trial's
/// symbols and noise are keyed by (seed, SNR index, channel, vector) and
/// shared across precoders.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<BerRecord>> {
    cfg.validate()?;
    with_workers(cfg.workers, || {
        let mut out = Vec::new();
        for &precoder in &cfg.precoders {
            for (i, &snr_db) in cfg.snr_grid_db.iter().enumerate() {
                out.push(run_cell(cfg, precoder, i, snr_db)?);
            }
        }
        Ok(out)
    })?
}

/// TreeStep at the first SNR of `cfg` for each parameter tuple.
pub fn run_param_study(cfg: &SweepConfig, grid: &[TreeStepParams]) -> Result<Vec<BerRecord>> {
    if grid.is_empty() {
        return Err(Error::InvalidParams("empty parameter grid".into()));
    }
    let mut base = cfg.clone();
    base.precoders = vec![PrecoderTag::TreeStep];
    base.snr_grid_db.truncate(1);
    base.validate()?;
    for params in grid {
        params.validate(base.n_users)?;
    }
    with_workers(cfg.workers, || {
        grid.iter()
            .map(|&params| {
                let cell_cfg = SweepConfig { treestep_params: params, ..base.clone() };
                run_cell(&cell_cfg, PrecoderTag::TreeStep, 0, cell_cfg.snr_grid_db[0])
            })
            .collect()
    })?
}
