//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// A real floating-point type the simulator can run on.
///
/// The thresholds are per-type: `f64` uses the values every tolerance in the
/// test suite is pinned against, `f32` scales them to its own precision.
pub trait Real: Float + FloatConst + FromPrimitive + Sum + Debug + Display + LowerExp + Send + Sync + 'static {
    /// Amplitudes with magnitude below this are dropped from sparse states.
    const PRUNE: f64;
    /// Norms-squared at or below this cannot be renormalized.
    const DEGENERATE: f64;

    fn prune_threshold() -> Self {
        Self::lit(Self::PRUNE)
    }

    fn degenerate_threshold() -> Self {
        Self::lit(Self::DEGENERATE)
    }

    /// Converts an `f64` literal; every `Real` can represent these approximately.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal is representable")
    }
}

impl Real for f64 {
    const PRUNE: f64 = 1e-14;
    const DEGENERATE: f64 = 1e-12;
}

impl Real for f32 {
    const PRUNE: f64 = 1e-7;
    const DEGENERATE: f64 = 1e-5;
}

/// Complex amplitude over a [`Real`] scalar.
pub type Amplitude<T> = Complex<T>;

pub(crate) fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}
