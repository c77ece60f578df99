//! Dense-vector reference evolution over the full `12^N` mode space.
//!
//! Written without the sparse machinery: single-photon modes are plain
//! indices `pol * 6 + bin * 2 + path` (`pol`: 0 = H, 1 = V; `path`: 0 = path 1,
//! 1 = path 2) and every element is an explicit 12x12 matrix assembled here.
//! Used to cross-check [`crate::protocols`] and arbitrary circuits.

use std::collections::BTreeMap;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::hilbert::{PathLabel, Polarization, PureState};
use crate::optics::Element;
use crate::protocols::ProtocolSpec;
use crate::scalar::Real;

pub const MODES: usize = 12;
const BINS: usize = 3;

/// Per-photon `(pol, bin, path)` digits of a dense mode index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Digits {
    pub pol: usize,
    pub bin: usize,
    pub path: usize,
}

fn index_of(pol: usize, bin: usize, path: usize) -> usize {
    pol * 6 + bin * 2 + path
}

fn digits_of(mode: usize) -> Digits {
    Digits {
        pol: mode / 6,
        bin: (mode % 6) / 2,
        path: mode % 2,
    }
}

/// Columns are input modes; `None` marks an input the element is undefined on.
type Matrix<T> = [Option<[Complex<T>; MODES]>; MODES];

fn identity<T: Real>() -> Matrix<T> {
    let mut m = [None; MODES];
    for (j, col) in m.iter_mut().enumerate() {
        let mut c = [Complex::new(T::zero(), T::zero()); MODES];
        c[j] = Complex::new(T::one(), T::zero());
        *col = Some(c);
    }
    m
}

fn element_matrix<T: Real>(el: &Element<T>) -> Matrix<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let mut m = identity::<T>();
    match el {
        Element::Rotation(theta) => {
            let (s, c) = theta.radians().sin_cos();
            for bin in 0..BINS {
                for path in 0..2 {
                    let h = index_of(0, bin, path);
                    let v = index_of(1, bin, path);
                    let mut col_h = [zero; MODES];
                    col_h[h] = Complex::new(c, T::zero());
                    col_h[v] = Complex::new(s, T::zero());
                    let mut col_v = [zero; MODES];
                    col_v[h] = Complex::new(-s, T::zero());
                    col_v[v] = Complex::new(c, T::zero());
                    m[h] = Some(col_h);
                    m[v] = Some(col_v);
                }
            }
        }
        Element::TagV | Element::TagH => {
            let pol = if matches!(el, Element::TagV) { 1 } else { 0 };
            for path in 0..2 {
                for bin in 0..BINS {
                    let j = index_of(pol, bin, path);
                    m[j] = if bin + 1 < BINS {
                        let mut col = [zero; MODES];
                        col[index_of(pol, bin + 1, path)] = one;
                        Some(col)
                    } else {
                        None
                    };
                }
            }
        }
        Element::ActiveDecoder => {
            for (j, col) in m.iter_mut().enumerate() {
                let d = digits_of(j);
                *col = if d.path == 0 || d.bin == 2 {
                    None
                } else {
                    // Matching tag keeps polarization and path 2, mismatch flips onto path 1.
                    let matched = d.pol == d.bin;
                    let (pol, path) = if matched { (d.pol, 1) } else { (1 - d.pol, 0) };
                    let mut c = [zero; MODES];
                    c[index_of(pol, 1, path)] = one;
                    Some(c)
                };
            }
        }
        Element::SigmaZPath1 => {
            for bin in 0..BINS {
                let j = index_of(1, bin, 0);
                let mut col = [zero; MODES];
                col[j] = -one;
                m[j] = Some(col);
            }
        }
    }
    m
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseState<T> {
    n: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Real> DenseState<T> {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            amps: vec![Complex::new(T::zero(), T::zero()); MODES.pow(n as u32)],
        }
    }

    pub fn n_photons(&self) -> usize {
        self.n
    }

    fn stride(&self, photon: usize) -> usize {
        MODES.pow((self.n - 1 - photon) as u32)
    }

    /// Dense index of a ket given per-photon `(pol, bin, path)` digits.
    pub fn index(&self, photons: &[Digits]) -> usize {
        photons
            .iter()
            .fold(0, |acc, d| acc * MODES + index_of(d.pol, d.bin, d.path))
    }

    pub fn digits(&self, mut index: usize) -> Vec<Digits> {
        let mut out = vec![digits_of(0); self.n];
        for slot in out.iter_mut().rev() {
            *slot = digits_of(index % MODES);
            index /= MODES;
        }
        out
    }

    pub fn amplitude(&self, index: usize) -> Complex<T> {
        self.amps[index]
    }

    pub fn set(&mut self, photons: &[Digits], amp: Complex<T>) {
        let i = self.index(photons);
        self.amps[i] = amp;
    }

    /// Copies a sparse state into the dense layout.
    pub fn from_sparse(state: &PureState<T>) -> Self {
        let mut out = Self::zero(state.n_photons());
        for (ket, amp) in state.iter() {
            let ds: Vec<Digits> = ket
                .modes()
                .iter()
                .map(|m| sparse_digits(m.pol, m.bin.ticks(), m.path))
                .collect();
            out.set(&ds, *amp);
        }
        out
    }

    pub fn norm_squared(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply(&self, photon: usize, element: &Element<T>) -> Result<Self> {
        if photon >= self.n {
            return Err(Error::Dimension(format!("photon {photon} of {}", self.n)));
        }
        let m = element_matrix(element);
        let stride = self.stride(photon);
        let mut out = Self::zero(self.n);
        for (idx, amp) in self.amps.iter().enumerate() {
            if amp.norm() < T::prune_threshold() {
                continue;
            }
            let d = (idx / stride) % MODES;
            let col = m[d].ok_or_else(|| {
                Error::ProtocolMisuse(format!("dense: element undefined on input mode {d} of photon {photon}"))
            })?;
            let base = idx - d * stride;
            for (o, coeff) in col.iter().enumerate() {
                if coeff.re != T::zero() || coeff.im != T::zero() {
                    out.amps[base + o * stride] = out.amps[base + o * stride] + *amp * *coeff;
                }
            }
        }
        Ok(out)
    }

    pub fn apply_to_all(&self, element: &Element<T>) -> Result<Self> {
        (0..self.n).try_fold(self.clone(), |s, i| s.apply(i, element))
    }

    pub fn run_circuit(&self, circuit: &[(usize, Element<T>)]) -> Result<Self> {
        circuit.iter().try_fold(self.clone(), |s, (p, el)| s.apply(*p, el))
    }

    /// Worst amplitude difference against a sparse state, over every dense index.
    pub fn max_abs_diff_sparse(&self, state: &PureState<T>) -> Result<T> {
        if state.n_photons() != self.n {
            return Err(Error::Dimension(format!("{} vs {} photons", self.n, state.n_photons())));
        }
        let other = Self::from_sparse(state);
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max))
    }

    /// Total weight grouped by a per-ket label.
    pub fn weights_by<K: Ord>(&self, label: impl Fn(&[Digits]) -> K) -> BTreeMap<K, T> {
        let mut out = BTreeMap::new();
        for (idx, amp) in self.amps.iter().enumerate() {
            let w = amp.norm_sqr();
            if w == T::zero() {
                continue;
            }
            let slot = out.entry(label(&self.digits(idx))).or_insert_with(T::zero);
            *slot = *slot + w;
        }
        out
    }
}

fn sparse_digits(pol: Polarization, ticks: u8, path: PathLabel) -> Digits {
    Digits {
        pol: match pol {
            Polarization::H => 0,
            Polarization::V => 1,
        },
        bin: ticks as usize,
        path: match path {
            PathLabel::Path1 => 0,
            PathLabel::Path2 => 1,
        },
    }
}

/// Undelayed GHZ source on path 2.
pub fn dense_source<T: Real>(n: usize, alpha: Complex<T>, beta: Complex<T>) -> DenseState<T> {
    let mut s = DenseState::zero(n);
    let h = Digits {
        pol: 0,
        bin: 0,
        path: 1,
    };
    let v = Digits {
        pol: 1,
        bin: 0,
        path: 1,
    };
    s.set(&vec![h; n], alpha);
    s.set(&vec![v; n], beta);
    s
}

fn dense_sent<T: Real>(spec: &ProtocolSpec<T>, encode: bool) -> Result<DenseState<T>> {
    let c = spec.coeffs();
    let mut s = dense_source(spec.n_parties(), c.alpha(), c.beta());
    if encode {
        s = s.apply_to_all(&Element::TagV)?;
    }
    for (i, theta) in spec.thetas().iter().enumerate() {
        s = s.apply(i, &Element::Rotation(*theta))?;
    }
    Ok(s)
}

pub fn dense_direct<T: Real>(spec: &ProtocolSpec<T>) -> Result<DenseState<T>> {
    dense_sent(spec, false)
}

pub fn dense_passive_tagged<T: Real>(spec: &ProtocolSpec<T>) -> Result<DenseState<T>> {
    dense_sent(spec, true)?.apply_to_all(&Element::TagH)
}

pub fn dense_active<T: Real>(spec: &ProtocolSpec<T>, correct_phase: bool) -> Result<DenseState<T>> {
    let decoded = dense_sent(spec, true)?.apply_to_all(&Element::ActiveDecoder)?;
    if correct_phase {
        decoded.apply_to_all(&Element::SigmaZPath1)
    } else {
        Ok(decoded)
    }
}
