//! Vector perturbation precoding under a per-antenna power constraint.
//!
//! The crate provides the TreeStep perturbation search, zero-forcing and
//! regularized zero-forcing precoders, a fixed-complexity sphere encoder
//! baseline, an exhaustive oracle for tiny instances, and a Monte-Carlo
//! bit-error-rate harness for downlink multi-user MIMO over Rayleigh fading.
//!
//! ```
//! use treestep::{treestep_solve, RngStream, TreeStepParams};
//! use treestep::testing::random_problem;
//!
//! let problem = random_problem(4, 4, 4, 1);
//! let out = treestep_solve(&problem, &TreeStepParams::new(1, 1, 0), &mut RngStream::from_seed(0)).unwrap();
//! assert_eq!(out.candidates_evaluated, 4);
//! ```

pub mod channel;
pub mod constellation;
pub mod error;
pub mod harness;
pub mod numerics;
pub mod precoding;
pub mod solvers;
pub mod testing;

pub use channel::{apply_channel, sample_rayleigh, sigma_for_snr, ChannelInstance, RngStream, SnrConfig};
pub use constellation::{make_constellation, Constellation};
pub use error::{Error, Result};
pub use harness::{
    emit_results, run_param_study, run_sweep, run_trial, verify_suite, BerRecord, OutputFormat,
    PrecoderTag, SweepConfig, VerifyReport,
};
pub use numerics::{ComplexMatrix, ComplexVector, C64};
pub use precoding::{
    fold_complex, make_vpp_problem, objective, rzf_precoder, transmit_vector, zf_precoder,
    PerturbationVector, PrecodingMatrix, VppProblem,
};
pub use solvers::{
    exhaustive_solve, fse_solve, full_expansion, local_min_dim, single_expansion, treestep_solve,
    FseSelection, LocalMinResult, PartialPerturbation, SolveOutcome, TreeStepParams,
};
