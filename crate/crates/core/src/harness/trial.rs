use crate::channel::{apply_channel, ChannelInstance, RngStream, SnrConfig};
use crate::constellation::Constellation;
use crate::error::Result;
use crate::precoding::{
    make_vpp_problem, rzf_precoder, transmit_vector, zf_precoder, PerturbationVector,
    PrecodingMatrix,
};
use crate::solvers::{exhaustive_solve, fse_solve, FseSelection, TreeStep};

use super::{PrecoderTag, SweepConfig, VppBase};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrialOutcome {
    pub bit_errors: u64,
    pub bits: u64,
    /// `γ = ‖W(u + τv)‖∞` of the transmitted vector.
    pub objective: f64,
}

/// One precoder on one channel at one SNR; the precoding matrix is built
/// once and reused across transmit vectors.
#[derive(Debug, Clone)]
pub struct TrialRunner<'a> {
    cfg: &'a SweepConfig,
    precoder: PrecoderTag,
    channel: &'a ChannelInstance,
    snr: SnrConfig,
    constellation: Constellation,
    w: PrecodingMatrix,
}

impl<'a> TrialRunner<'a> {
    pub fn new(
        cfg: &'a SweepConfig,
        precoder: PrecoderTag,
        channel: &'a ChannelInstance,
        snr: SnrConfig,
    ) -> Result<Self> {
        let use_rzf = match precoder {
            PrecoderTag::Zf => false,
            PrecoderTag::Rzf => true,
            _ => cfg.vpp_base == VppBase::Rzf,
        };
        let w = if use_rzf {
            rzf_precoder(channel, &snr)?
        } else {
            zf_precoder(channel)?
        };
        Ok(Self {
            cfg,
            precoder,
            channel,
            snr,
            constellation: Constellation::new(cfg.mod_order)?,
            w,
        })
    }

    /// bits → symbols → perturbation search → normalized transmit → channel
    /// → genie-scaled (and for VPP, modulo-folded) detection.
    ///
    /// Draw order from `rng` is the same for every precoder: one `u64` for
    /// the solver's own stream, the symbols, then the noise.
    pub fn run(&self, rng: &mut RngStream) -> Result<TrialOutcome> {
        let mut solver_rng = rng.fork();
        let c = &self.constellation;
        let n_users = self.channel.n_users();
        let sent: Vec<usize> = (0..n_users).map(|_| rng.index_below(c.order())).collect();
        let u: Vec<_> = sent.iter().map(|&i| c.symbol(i)).collect();
        let p = make_vpp_problem(&self.w, &u, c.tau())?;

        let v_hat = match self.precoder {
            PrecoderTag::Zf | PrecoderTag::Rzf => PerturbationVector::zeros(p.dims()),
            PrecoderTag::Fse => fse_solve(&p, &self.w.w, &u, self.cfg.fse_v, FseSelection::L2)?.v_hat,
            PrecoderTag::FseMod => {
                fse_solve(&p, &self.w.w, &u, self.cfg.fse_v, FseSelection::Linf)?.v_hat
            }
            PrecoderTag::TreeStep => {
                TreeStep::new(self.cfg.treestep_params)
                    .solve(&p, &mut solver_rng)?
                    .v_hat
            }
            PrecoderTag::Oracle => exhaustive_solve(&p, self.cfg.oracle_v)?.v_hat,
        };

        let (x, gamma) = transmit_vector(&p, &v_hat, self.snr.power)?;
        let y = apply_channel(self.channel, &x, &self.snr, rng)?;
        let scale = gamma / self.snr.power.sqrt();
        let fold = self.precoder.is_vpp();

        let mut errors = 0u64;
        for (yi, &s) in y.iter().zip(&sent) {
            let mut z = yi * scale;
            if fold {
                z = c.modulo_tau(z);
            }
            let (idx, _) = c.nearest_symbol(z);
            errors += (idx ^ s).count_ones() as u64;
        }
        Ok(TrialOutcome {
            bit_errors: errors,
            bits: (n_users * c.bits_per_symbol()) as u64,
            objective: gamma,
        })
    }
}

pub fn run_trial(
    cfg: &SweepConfig,
    precoder: PrecoderTag,
    channel: &ChannelInstance,
    snr: &SnrConfig,
    rng: &mut RngStream,
) -> Result<TrialOutcome> {
    TrialRunner::new(cfg, precoder, channel, *snr)?.run(rng)
}
