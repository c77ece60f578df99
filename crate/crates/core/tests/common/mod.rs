#![allow(dead_code)]

use num_complex::Complex;
use qtag_core::hilbert::{BasisKet, PathLabel, PhotonMode, Polarization, TimeBin};

/// Parses `H`, `VT`, `HTT1`, ...: polarization, one `T` per delay, optional path digit (default 2).
pub fn mode(token: &str) -> PhotonMode {
    let mut chars = token.chars();
    let pol = match chars.next() {
        Some('H') => Polarization::H,
        Some('V') => Polarization::V,
        other => panic!("bad polarization in {token}: {other:?}"),
    };
    let rest: String = chars.collect();
    let ticks = rest.chars().filter(|&c| c == 'T').count() as u8;
    let path = match rest.chars().last() {
        Some('1') => PathLabel::Path1,
        _ => PathLabel::Path2,
    };
    PhotonMode::new(pol, TimeBin::new(ticks).unwrap(), path)
}

/// Space-separated per-photon tokens.
pub fn ket(spec: &str) -> BasisKet {
    spec.split_whitespace().map(mode).collect()
}

pub fn r(x: f64) -> Complex<f64> {
    Complex::new(x, 0.0)
}
