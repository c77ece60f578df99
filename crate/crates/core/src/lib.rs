//! Simulation and verification of alignment-free polarization-entanglement
//! transmission with time-tag encoding.
//!
//! Photons carry polarization, a discrete time bin and an output path. A GHZ
//! source state is tagged, rotated by an unknown angle per channel, and then
//! either post-selected on arrival time or routed through a Pockels-cell
//! decoder. [`analysis`] compares every pipeline against closed forms and an
//! independent dense-vector evolution in [`oracle`].
//!
//! All numerics are generic over [`Real`]; the aliases below fix `f64`.

pub mod analysis;
pub mod error;
pub mod hilbert;
pub mod optics;
pub mod oracle;
pub mod protocols;
pub mod sampling;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Amplitude, Real};

pub type PureState64 = hilbert::PureState<f64>;
pub type PolarizationState64 = hilbert::PolarizationState<f64>;
pub type ModeMap64 = hilbert::ModeMap<f64>;
pub type ProtocolSpec64 = protocols::ProtocolSpec<f64>;
pub type SourceCoefficients64 = protocols::SourceCoefficients<f64>;
pub type TransmissionOutcome64 = protocols::TransmissionOutcome<f64>;
pub type SweepGrid64 = analysis::SweepGrid<f64>;
pub type SweepResult64 = analysis::SweepResult<f64>;
pub type DenseState64 = oracle::DenseState<f64>;

pub type PureState32 = hilbert::PureState<f32>;
pub type ProtocolSpec32 = protocols::ProtocolSpec<f32>;
pub type SweepResult32 = analysis::SweepResult<f32>;
