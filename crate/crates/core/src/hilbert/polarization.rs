use std::collections::BTreeMap;

use num_complex::Complex;

use super::mode::{PathLabel, Polarization, TimeBin};
use super::state::PureState;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// State over polarization only: the form fidelity targets are written in.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizationState<T> {
    n_photons: usize,
    amplitudes: BTreeMap<Vec<Polarization>, Complex<T>>,
}

impl<T: Real> PolarizationState<T> {
    pub fn from_terms<I>(n_photons: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<Polarization>, Complex<T>)>,
    {
        let mut amplitudes = BTreeMap::new();
        for (pols, amp) in terms {
            if pols.len() != n_photons {
                return Err(Error::Dimension(format!(
                    "polarization ket of length {} in a {n_photons}-photon state",
                    pols.len()
                )));
            }
            let slot = amplitudes
                .entry(pols)
                .or_insert_with(|| Complex::new(T::zero(), T::zero()));
            *slot = *slot + amp;
        }
        let eps = T::prune_threshold();
        amplitudes.retain(|_, a: &mut Complex<T>| a.norm() >= eps);
        Ok(Self { n_photons, amplitudes })
    }

    /// `alpha |H...H> + beta |V...V>`.
    pub fn ghz(n_photons: usize, alpha: Complex<T>, beta: Complex<T>) -> Result<Self> {
        Self::from_terms(
            n_photons,
            [
                (vec![Polarization::H; n_photons], alpha),
                (vec![Polarization::V; n_photons], beta),
            ],
        )
    }

    pub fn n_photons(&self) -> usize {
        self.n_photons
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<Polarization>, &Complex<T>)> {
        self.amplitudes.iter()
    }

    pub fn amplitude(&self, pols: &[Polarization]) -> Complex<T> {
        self.amplitudes
            .get(pols)
            .copied()
            .unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    pub fn inner_product(&self, other: &Self) -> Result<Complex<T>> {
        if self.n_photons != other.n_photons {
            return Err(Error::Dimension(format!(
                "{} photons vs {} photons",
                self.n_photons, other.n_photons
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .filter_map(|(k, a)| other.amplitudes.get(k).map(|b| a.conj() * b))
            .fold(Complex::new(T::zero(), T::zero()), |acc, x| acc + x))
    }
}

/// Time-bin and path labels shared by every ket of a register-separable state.
pub type RegisterLabel = (Vec<TimeBin>, Vec<PathLabel>);

impl<T: Real> PureState<T> {
    /// Splits off the common time-bin/path label.
    ///
    /// Fails with [`Error::EntangledRegister`] unless every stored ket carries the
    /// same bin and path pattern. The zero state has no label and also fails.
    pub fn polarization_part(&self) -> Result<(PolarizationState<T>, RegisterLabel)> {
        let mut label: Option<RegisterLabel> = None;
        let mut terms = Vec::with_capacity(self.len());
        for (ket, amp) in self.iter() {
            let this = (ket.bins(), ket.paths());
            match &label {
                None => label = Some(this),
                Some(l) if *l == this => {}
                Some(_) => return Err(Error::EntangledRegister),
            }
            terms.push((ket.polarizations(), *amp));
        }
        let label = label.ok_or(Error::EntangledRegister)?;
        Ok((PolarizationState::from_terms(self.n_photons(), terms)?, label))
    }
}

/// `|<target|pol(s)>|^2` for a normalized, register-separable `s`.
pub fn fidelity_polarization<T: Real>(state: &PureState<T>, target: &PolarizationState<T>) -> Result<T> {
    let (pol, _) = state.polarization_part()?;
    Ok(target.inner_product(&pol)?.norm_sqr())
}
