use std::collections::BTreeMap;

use num_complex::Complex;

use super::map::{ModeMap, ModeRule};
use super::mode::{BasisKet, PhotonMode};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Sparse pure state of `n` photons.
///
/// Kets are kept in canonical order and amplitudes below [`Real::PRUNE`] are
/// dropped, so two states built along different routes compare structurally.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState<T> {
    n_photons: usize,
    amplitudes: BTreeMap<BasisKet, Complex<T>>,
}

impl<T: Real> PureState<T> {
    /// The zero vector on `n` photons.
    pub fn zero(n_photons: usize) -> Result<Self> {
        if n_photons == 0 {
            return Err(Error::Dimension("a state needs at least one photon".into()));
        }
        Ok(Self {
            n_photons,
            amplitudes: BTreeMap::new(),
        })
    }

    /// Sums the given terms; repeated kets accumulate.
    pub fn from_terms<I>(n_photons: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BasisKet, Complex<T>)>,
    {
        let mut state = Self::zero(n_photons)?;
        for (ket, amp) in terms {
            if ket.len() != n_photons {
                return Err(Error::Dimension(format!(
                    "ket {ket} has {} photons, state has {n_photons}",
                    ket.len()
                )));
            }
            state.accumulate(ket, amp);
        }
        state.prune();
        Ok(state)
    }

    /// Single product ket with unit amplitude.
    pub fn product(modes: Vec<PhotonMode>) -> Result<Self> {
        let n = modes.len();
        Self::from_terms(n, [(BasisKet::new(modes), Complex::new(T::one(), T::zero()))])
    }

    pub fn n_photons(&self) -> usize {
        self.n_photons
    }

    /// Number of stored (nonzero) kets.
    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisKet, &Complex<T>)> {
        self.amplitudes.iter()
    }

    pub fn amplitude(&self, ket: &BasisKet) -> Complex<T> {
        self.amplitudes
            .get(ket)
            .copied()
            .unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    fn accumulate(&mut self, ket: BasisKet, amp: Complex<T>) {
        let slot = self
            .amplitudes
            .entry(ket)
            .or_insert_with(|| Complex::new(T::zero(), T::zero()));
        *slot = *slot + amp;
    }

    fn prune(&mut self) {
        let eps = T::prune_threshold();
        self.amplitudes.retain(|_, a| a.norm() >= eps);
    }

    fn check_same_size(&self, other: &Self) -> Result<()> {
        if self.n_photons != other.n_photons {
            return Err(Error::Dimension(format!(
                "{} photons vs {} photons",
                self.n_photons, other.n_photons
            )));
        }
        Ok(())
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner_product(&self, other: &Self) -> Result<Complex<T>> {
        self.check_same_size(other)?;
        let (small, large, flip) = if self.len() <= other.len() {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let mut acc = Complex::new(T::zero(), T::zero());
        for (ket, a) in &small.amplitudes {
            if let Some(b) = large.amplitudes.get(ket) {
                acc = acc + if flip { b.conj() * a } else { a.conj() * b };
            }
        }
        Ok(acc)
    }

    pub fn norm_squared(&self) -> T {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_squared() - T::one()).abs() <= T::degenerate_threshold()
    }

    /// Rescales to unit norm by a positive real factor.
    pub fn normalize(&self) -> Result<Self> {
        let n2 = self.norm_squared();
        if n2 <= T::degenerate_threshold() {
            return Err(Error::Degenerate {
                norm_sqr: n2.to_f64().unwrap_or(0.0),
            });
        }
        Ok(self.scaled(Complex::new(T::one() / n2.sqrt(), T::zero())))
    }

    pub fn scaled(&self, factor: Complex<T>) -> Self {
        let mut out = Self {
            n_photons: self.n_photons,
            amplitudes: self.amplitudes.iter().map(|(k, a)| (k.clone(), *a * factor)).collect(),
        };
        out.prune();
        out
    }

    /// Amplitude-wise sum.
    pub fn plus(&self, other: &Self) -> Result<Self> {
        self.check_same_size(other)?;
        let mut out = self.clone();
        for (k, a) in &other.amplitudes {
            out.accumulate(k.clone(), *a);
        }
        out.prune();
        Ok(out)
    }

    /// Applies `map` to photon `photon`, ket by ket.
    pub fn apply_single_photon_map(&self, photon: usize, map: &ModeMap<T>) -> Result<Self> {
        if photon >= self.n_photons {
            return Err(Error::Dimension(format!(
                "photon index {photon} out of range for {} photons",
                self.n_photons
            )));
        }
        let mut out = Self::zero(self.n_photons)?;
        for (ket, amp) in &self.amplitudes {
            let input = ket.mode(photon);
            match map.rule(&input) {
                None => out.accumulate(ket.clone(), *amp),
                Some(ModeRule::Image(image)) => {
                    for (mode, coeff) in image {
                        out.accumulate(ket.with_mode(photon, *mode), *amp * coeff);
                    }
                }
                Some(ModeRule::Forbidden(reason)) => {
                    return Err(Error::ProtocolMisuse(format!(
                        "{} applied to photon {photon} in mode {input}: {reason}",
                        map.name()
                    )));
                }
            }
        }
        out.prune();
        Ok(out)
    }

    /// Same map on every photon, photon 0 first.
    pub fn apply_to_all(&self, map: &ModeMap<T>) -> Result<Self> {
        (0..self.n_photons).try_fold(self.clone(), |s, i| s.apply_single_photon_map(i, map))
    }

    /// Restriction to kets satisfying `keep`, left unnormalized, with its weight.
    pub fn project<F>(&self, keep: F) -> (Self, T)
    where
        F: Fn(&BasisKet) -> bool,
    {
        let amplitudes: BTreeMap<_, _> = self
            .amplitudes
            .iter()
            .filter(|(k, _)| keep(k))
            .map(|(k, a)| (k.clone(), *a))
            .collect();
        let out = Self {
            n_photons: self.n_photons,
            amplitudes,
        };
        let p = out.norm_squared();
        (out, p)
    }

    /// Groups kets by `label`, returning each group's unnormalized component.
    pub fn partition<K, F>(&self, label: F) -> BTreeMap<K, Self>
    where
        K: Ord,
        F: Fn(&BasisKet) -> K,
    {
        let mut groups: BTreeMap<K, Self> = BTreeMap::new();
        for (ket, amp) in &self.amplitudes {
            groups
                .entry(label(ket))
                .or_insert_with(|| Self {
                    n_photons: self.n_photons,
                    amplitudes: BTreeMap::new(),
                })
                .amplitudes
                .insert(ket.clone(), *amp);
        }
        groups
    }

    /// Largest amplitude-wise difference to `other` over the union of supports.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.check_same_size(other)?;
        let mut worst = T::zero();
        for (k, a) in &self.amplitudes {
            worst = worst.max((*a - other.amplitude(k)).norm());
        }
        for (k, b) in &other.amplitudes {
            if !self.amplitudes.contains_key(k) {
                worst = worst.max(b.norm());
            }
        }
        Ok(worst)
    }
}
