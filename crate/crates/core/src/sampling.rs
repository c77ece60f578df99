//! Random specs, states and circuits for cross-checks and property tests.

use std::f64::consts::PI;

use num_complex::Complex;
use rand::Rng;

use crate::error::Result;
use crate::hilbert::{BasisKet, PathLabel, PhotonMode, Polarization, PureState, TimeBin};
use crate::optics::{Element, PcEfficiency, RotationAngle};
use crate::protocols::{ProtocolSpec, SourceCoefficients, Variant};
use crate::scalar::Real;

fn unit_complex_pair<R: Rng + ?Sized>(rng: &mut R) -> (Complex<f64>, Complex<f64>) {
    loop {
        let v: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n2: f64 = v.iter().map(|x| x * x).sum();
        if n2 > 1e-3 && n2 <= 1.0 {
            let k = 1.0 / n2.sqrt();
            return (Complex::new(v[0] * k, v[1] * k), Complex::new(v[2] * k, v[3] * k));
        }
    }
}

/// Uniform on the unit sphere of `C^2`, so generically complex.
pub fn random_coeffs<T: Real, R: Rng + ?Sized>(rng: &mut R) -> SourceCoefficients<T> {
    let (a, b) = unit_complex_pair(rng);
    let conv = |z: Complex<f64>| Complex::new(T::lit(z.re), T::lit(z.im));
    SourceCoefficients::normalized(conv(a), conv(b)).expect("sampled pair is nonzero")
}

/// Angle uniform in `[-2pi, 2pi)`.
pub fn random_angle<T: Real, R: Rng + ?Sized>(rng: &mut R) -> RotationAngle<T> {
    RotationAngle::new(T::lit(rng.random_range(-2.0 * PI..2.0 * PI))).expect("finite")
}

/// Random spec with party count drawn from `parties`, ideal Pockels cells.
pub fn random_spec<T: Real, R: Rng + ?Sized>(rng: &mut R, variant: Variant, parties: &[usize]) -> ProtocolSpec<T> {
    let n = parties[rng.random_range(0..parties.len())];
    let thetas = (0..n).map(|_| random_angle(rng)).collect();
    ProtocolSpec::new(variant, random_coeffs(rng), thetas, PcEfficiency::ideal()).expect("n >= 2")
}

/// Random normalized state on `n` photons over `terms` kets drawn from `pool`.
pub fn random_state<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    terms: usize,
    pool: &[PhotonMode],
) -> Result<PureState<T>> {
    loop {
        let kets = (0..terms).map(|_| {
            let ket: BasisKet = (0..n).map(|_| pool[rng.random_range(0..pool.len())]).collect();
            let (a, _) = unit_complex_pair(rng);
            (ket, Complex::new(T::lit(a.re), T::lit(a.im)))
        });
        let state = PureState::from_terms(n, kets.collect::<Vec<_>>())?;
        if state.norm_squared() > T::lit(1e-6) {
            return state.normalize();
        }
    }
}

/// Modes every element in [`Element`] is defined on: bins 0 and 1, default path.
pub fn undecoded_modes() -> Vec<PhotonMode> {
    PhotonMode::all()
        .filter(|m| m.path == PathLabel::DEFAULT && m.bin != TimeBin::MAX)
        .collect()
}

/// Random well-formed circuit on photons starting in [`undecoded_modes`].
///
/// Tags are only drawn while the photon still has a free slot and each photon
/// meets at most one decoder, so the circuit never hits an undefined input.
pub fn random_circuit<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize, len: usize) -> Vec<(usize, Element<T>)> {
    let mut latest_bin = vec![1u8; n];
    let mut decoded = vec![false; n];
    let mut out = Vec::with_capacity(len);
    while out.len() < len {
        let photon = rng.random_range(0..n);
        let el = match rng.random_range(0..5) {
            0 => Element::Rotation(random_angle(rng)),
            1 if latest_bin[photon] < 2 => {
                latest_bin[photon] += 1;
                Element::TagV
            }
            2 if latest_bin[photon] < 2 => {
                latest_bin[photon] += 1;
                Element::TagH
            }
            3 if !decoded[photon] && latest_bin[photon] <= 1 => {
                decoded[photon] = true;
                Element::ActiveDecoder
            }
            4 => Element::SigmaZPath1,
            _ => continue,
        };
        out.push((photon, el));
    }
    out
}

/// Every polarization with the given bin on the default path.
pub fn modes_in_bin(bin: TimeBin) -> Vec<PhotonMode> {
    Polarization::ALL
        .into_iter()
        .map(|p| PhotonMode::new(p, bin, PathLabel::DEFAULT))
        .collect()
}
