//! Exact pure states of N photons, each labelled by polarization, time bin and path.

mod map;
mod mode;
mod polarization;
mod state;

pub use map::{ModeMap, ModeRule};
pub use mode::{BasisKet, PathLabel, PhotonMode, Polarization, TimeBin};
pub use polarization::{fidelity_polarization, PolarizationState, RegisterLabel};
pub use state::PureState;
