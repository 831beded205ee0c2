//! Barnett–Pegg quantum-phase-fluctuation metrics for intermediate photon states.
//!
//! States are real amplitude vectors in the photon-number basis
//! ([`FockState`]). Moments are summed directly over those vectors and serve
//! as the reference for everything else: the phase report ([`bp_phase_report`]),
//! the antibunching witnesses, and the cross-checks of the closed-form
//! expressions in [`closed`].
//!
//! ```
//! use qphase::{binomial_state, bp_phase_report, antibunching_witness};
//!
//! let state = binomial_state(0.5, 2).unwrap();
//! let report = bp_phase_report(&state).unwrap();
//! // antibunched, yet U sits above its coherent-state value
//! assert!(antibunching_witness(&state) < 0.0);
//! assert!(report.d_u > 0.0);
//! ```

// `!(x > y)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod closed;
pub mod error;
pub mod families;
pub mod fock;
pub mod phase;
pub mod special;
pub mod sweep;

pub use closed::{cross_check, CrossCheckReport, Quantity, Verdict};
pub use error::{Error, Result};
pub use families::{
    binomial_state, coherent_state, generalized_binomial_state, hypergeometric_state,
    negative_binomial_state, photon_added_coherent_state, Family, StateParams, StateSpec,
    Truncation, TruncationReport,
};
pub use fock::{FockState, MomentSet};
pub use phase::{
    antibunching_witness, bp_phase_report, d_u, hoa_witness, total_amplitude_noise, u_parameter,
    witnesses, PhaseReport, WitnessSet,
};
pub use sweep::{figure_preset, run_sweep, validate_csv, Axis, SweepConfig, SweepRow, SweepTable};
