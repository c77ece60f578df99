//! Closed forms, angle sweeps and the simulator/oracle/closed-form cross-check.

mod closed_form;
mod sweep;
mod verify;

pub use closed_form::{
    closed_form_direct_fidelity, closed_form_f1, closed_form_f2, closed_form_loss, closed_form_p_active_branch,
    closed_form_p_passive, closed_form_uncorrected_fidelity, lambdas,
};
pub use sweep::{sweep, Columns, Provenance, SweepGrid, SweepResult, SweepRow, COLUMN_NAMES};
pub use verify::{verify, verify_specs, Discrepancy, VerifyOptions, VerifyReport, DEFAULT_TOLERANCE, DEFAULT_TRIALS};
