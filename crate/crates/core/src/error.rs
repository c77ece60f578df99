use thiserror::Error;

/// Errors raised by state manipulation, optical elements and protocol pipelines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("degenerate state: norm squared {norm_sqr:e} is below the renormalization threshold")]
    Degenerate { norm_sqr: f64 },

    #[error("protocol misuse: {0}")]
    ProtocolMisuse(String),

    #[error("time-bin/path registers are entangled with polarization; polarization fidelity is undefined")]
    EntangledRegister,

    #[error("invalid protocol specification: {0}")]
    Spec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
