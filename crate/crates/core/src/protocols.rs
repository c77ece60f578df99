//! End-to-end transmission pipelines for N parties.
//!
//! Every pipeline starts from `alpha |H...H> + beta |V...V>`, tags the `V`
//! component at the source, sends photon `i` through a channel rotated by
//! `thetas[i]` and then either heralds on arrival time (passive) or routes
//! through the Pockels-cell decoder (active).

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::hilbert::{
    fidelity_polarization, BasisKet, PathLabel, PhotonMode, Polarization, PolarizationState, PureState, TimeBin,
};
use crate::optics::{
    active_decoder_map, pc_loss_factor, rotation_map, sigma_z_path1, tag_h, tag_v, PcEfficiency, RotationAngle,
};
use crate::scalar::{re, Real};

/// GHZ source amplitudes, `|alpha|^2 + |beta|^2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceCoefficients<T> {
    alpha: Complex<T>,
    beta: Complex<T>,
}

impl<T: Real> SourceCoefficients<T> {
    /// Rejects coefficients off the unit sphere by more than [`Real::DEGENERATE`].
    pub fn new(alpha: Complex<T>, beta: Complex<T>) -> Result<Self> {
        let n2 = alpha.norm_sqr() + beta.norm_sqr();
        if n2.is_nan() || (n2 - T::one()).abs() > T::degenerate_threshold() {
            return Err(Error::Spec(format!("|alpha|^2 + |beta|^2 = {n2}, expected 1")));
        }
        Ok(Self { alpha, beta })
    }

    /// Rescales any nonzero pair onto the unit sphere.
    pub fn normalized(alpha: Complex<T>, beta: Complex<T>) -> Result<Self> {
        let n2 = alpha.norm_sqr() + beta.norm_sqr();
        if !n2.is_finite() || n2 <= T::degenerate_threshold() {
            return Err(Error::Spec("alpha and beta are both zero".into()));
        }
        let k = T::one() / n2.sqrt();
        Ok(Self {
            alpha: alpha * k,
            beta: beta * k,
        })
    }

    /// `alpha = 1/sqrt(2)`, `beta = -1/sqrt(2)`: the coefficients of the reference curves.
    pub fn reference() -> Self {
        let a = T::lit(FRAC_1_SQRT_2);
        Self {
            alpha: re(a),
            beta: re(-a),
        }
    }

    pub fn alpha(&self) -> Complex<T> {
        self.alpha
    }

    pub fn beta(&self) -> Complex<T> {
        self.beta
    }

    /// The state the parties are meant to share, as a fidelity target.
    pub fn target(&self, n_parties: usize) -> Result<PolarizationState<T>> {
        PolarizationState::ghz(n_parties, self.alpha, self.beta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variant {
    /// No encoding or decoding: the noisy state as received.
    PassiveDirect,
    /// Time-tag encoding, `T_H` decoding and arrival-time post-selection.
    PassiveTagged,
    /// Time-tag encoding and the Pockels-cell decoder with path-1 `sigma_z`.
    ActivePc,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::PassiveDirect, Variant::PassiveTagged, Variant::ActivePc];

    pub fn name(self) -> &'static str {
        match self {
            Variant::PassiveDirect => "passive-direct",
            Variant::PassiveTagged => "passive-tagged",
            Variant::ActivePc => "active",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolSpec<T> {
    n_parties: usize,
    coeffs: SourceCoefficients<T>,
    variant: Variant,
    thetas: Vec<RotationAngle<T>>,
    eta: PcEfficiency<T>,
}

impl<T: Real> ProtocolSpec<T> {
    pub fn new(
        variant: Variant,
        coeffs: SourceCoefficients<T>,
        thetas: Vec<RotationAngle<T>>,
        eta: PcEfficiency<T>,
    ) -> Result<Self> {
        let n_parties = thetas.len();
        if n_parties < 2 {
            return Err(Error::Spec(format!("need at least two parties, got {n_parties}")));
        }
        Ok(Self {
            n_parties,
            coeffs,
            variant,
            thetas,
            eta,
        })
    }

    /// Convenience constructor from raw radians with ideal Pockels cells.
    pub fn from_angles(variant: Variant, coeffs: SourceCoefficients<T>, thetas: &[T]) -> Result<Self> {
        let thetas = thetas
            .iter()
            .map(|&t| RotationAngle::new(t))
            .collect::<Result<Vec<_>>>()?;
        Self::new(variant, coeffs, thetas, PcEfficiency::ideal())
    }

    pub fn with_variant(&self, variant: Variant) -> Self {
        Self {
            variant,
            ..self.clone()
        }
    }

    pub fn with_eta(&self, eta: PcEfficiency<T>) -> Self {
        Self { eta, ..self.clone() }
    }

    pub fn n_parties(&self) -> usize {
        self.n_parties
    }

    pub fn coeffs(&self) -> &SourceCoefficients<T> {
        &self.coeffs
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn thetas(&self) -> &[RotationAngle<T>] {
        &self.thetas
    }

    pub fn eta(&self) -> PcEfficiency<T> {
        self.eta
    }

    fn expect_variant(&self, expected: Variant) -> Result<()> {
        if self.variant != expected {
            return Err(Error::Spec(format!(
                "spec is for {}, pipeline runs {expected}",
                self.variant
            )));
        }
        Ok(())
    }
}

impl<T: Real> fmt::Display for ProtocolSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} n={} alpha={} beta={} thetas=[",
            self.variant, self.n_parties, self.coeffs.alpha, self.coeffs.beta
        )?;
        for (i, t) in self.thetas.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, "] eta={}", self.eta.value())
    }
}

/// Which detection event a branch corresponds to.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HeraldPattern {
    /// Direct transmission has a single, unheralded outcome.
    Direct,
    /// Per-photon arrival slots.
    Bins(Vec<TimeBin>),
    /// Per-photon decoder output ports.
    Paths(Vec<PathLabel>),
}

impl HeraldPattern {
    /// Photon count, or `None` for the unheralded direct outcome.
    pub fn n_photons(&self) -> Option<usize> {
        match self {
            HeraldPattern::Direct => None,
            HeraldPattern::Bins(b) => Some(b.len()),
            HeraldPattern::Paths(p) => Some(p.len()),
        }
    }

    /// Number of photons leaving on path 1.
    pub fn path1_count(&self) -> usize {
        match self {
            HeraldPattern::Paths(p) => p.iter().filter(|&&x| x == PathLabel::Path1).count(),
            _ => 0,
        }
    }
}

impl fmt::Display for HeraldPattern {
    /// `direct`, bin ticks such as `11` / `20`, or path digits such as `21`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeraldPattern::Direct => f.write_str("direct"),
            HeraldPattern::Bins(bins) => bins.iter().try_for_each(|b| write!(f, "{}", b.ticks())),
            HeraldPattern::Paths(paths) => paths.iter().try_for_each(|p| write!(f, "{}", p.digit())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Conditional<T> {
    /// Normalized post-measurement state.
    pub state: PureState<T>,
    pub fidelity: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch<T> {
    pub probability: T,
    /// `None` when the branch is too improbable to renormalize.
    pub conditional: Option<Conditional<T>>,
}

impl<T: Real> Branch<T> {
    pub fn fidelity(&self) -> Option<T> {
        self.conditional.as_ref().map(|c| c.fidelity)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionOutcome<T> {
    pub variant: Variant,
    pub n_parties: usize,
    pub branches: BTreeMap<HeraldPattern, Branch<T>>,
    /// Probability of an accepted herald, including Pockels-cell loss.
    pub total_success_probability: T,
    /// Fidelity of the accepted output, probability-weighted across accepted
    /// branches. `None` if nothing was accepted with renormalizable weight.
    pub overall_fidelity_of_accepted: Option<T>,
}

impl<T: Real> TransmissionOutcome<T> {
    /// Sum over all branches, before any loss factor.
    pub fn branch_probability_sum(&self) -> T {
        self.branches.values().map(|b| b.probability).sum()
    }

    pub fn is_accepted(&self, pattern: &HeraldPattern) -> bool {
        match (self.variant, pattern) {
            (Variant::PassiveDirect, HeraldPattern::Direct) => true,
            (Variant::PassiveTagged, HeraldPattern::Bins(bins)) => bins.iter().all(|&b| b == TimeBin::ONE),
            (Variant::ActivePc, HeraldPattern::Paths(_)) => true,
            _ => false,
        }
    }

    pub fn accepted(&self) -> impl Iterator<Item = (&HeraldPattern, &Branch<T>)> {
        self.branches.iter().filter(|(p, _)| self.is_accepted(p))
    }

    pub fn rejected(&self) -> impl Iterator<Item = (&HeraldPattern, &Branch<T>)> {
        self.branches.iter().filter(|(p, _)| !self.is_accepted(p))
    }

    pub fn branch(&self, pattern: &HeraldPattern) -> Option<&Branch<T>> {
        self.branches.get(pattern)
    }
}

/// `alpha |H...H> + beta |V...V>`, every photon in bin 0 on the default path.
pub fn build_source<T: Real>(n: usize, coeffs: &SourceCoefficients<T>) -> Result<PureState<T>> {
    if n < 2 {
        return Err(Error::Spec(format!("need at least two parties, got {n}")));
    }
    PureState::from_terms(
        n,
        [
            (BasisKet::uniform(n, PhotonMode::source(Polarization::H)), coeffs.alpha),
            (BasisKet::uniform(n, PhotonMode::source(Polarization::V)), coeffs.beta),
        ],
    )
}

/// Source-side `T_V` on every photon.
pub fn encode<T: Real>(state: &PureState<T>) -> Result<PureState<T>> {
    if let Some((ket, _)) = state
        .iter()
        .find(|(k, _)| k.modes().iter().any(|m| m.bin != TimeBin::ZERO))
    {
        return Err(Error::ProtocolMisuse(format!(
            "encoding expects undelayed photons, found {ket}"
        )));
    }
    state.apply_to_all(&tag_v())
}

/// Rotates photon `i` by `thetas[i]`.
pub fn apply_channels<T: Real>(state: &PureState<T>, thetas: &[RotationAngle<T>]) -> Result<PureState<T>> {
    if thetas.len() != state.n_photons() {
        return Err(Error::Dimension(format!(
            "{} channel angles for {} photons",
            thetas.len(),
            state.n_photons()
        )));
    }
    thetas.iter().enumerate().try_fold(state.clone(), |s, (i, &theta)| {
        s.apply_single_photon_map(i, &rotation_map(theta))
    })
}

/// State at the receivers without any encoding.
pub fn direct_state<T: Real>(spec: &ProtocolSpec<T>) -> Result<PureState<T>> {
    let source = build_source(spec.n_parties, &spec.coeffs)?;
    apply_channels(&source, &spec.thetas)
}

/// State after `T_V`, the channels and receiver-side `T_H`, before heralding.
pub fn passive_tagged_state<T: Real>(spec: &ProtocolSpec<T>) -> Result<PureState<T>> {
    let source = build_source(spec.n_parties, &spec.coeffs)?;
    let sent = apply_channels(&encode(&source)?, &spec.thetas)?;
    sent.apply_to_all(&tag_h())
}

/// State at the decoder outputs, optionally with the path-1 `sigma_z`.
pub fn active_state<T: Real>(spec: &ProtocolSpec<T>, correct_phase: bool) -> Result<PureState<T>> {
    let source = build_source(spec.n_parties, &spec.coeffs)?;
    let sent = apply_channels(&encode(&source)?, &spec.thetas)?;
    let decoded = sent.apply_to_all(&active_decoder_map())?;
    if correct_phase {
        decoded.apply_to_all(&sigma_z_path1())
    } else {
        Ok(decoded)
    }
}

fn package_branches<T: Real>(
    state: &PureState<T>,
    target: &PolarizationState<T>,
    label: impl Fn(&BasisKet) -> HeraldPattern,
) -> Result<BTreeMap<HeraldPattern, Branch<T>>> {
    state
        .partition(label)
        .into_iter()
        .map(|(pattern, component)| {
            let probability = component.norm_squared();
            let conditional = match component.normalize() {
                Ok(state) => {
                    let fidelity = fidelity_polarization(&state, target)?;
                    Some(Conditional { state, fidelity })
                }
                Err(Error::Degenerate { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok((
                pattern,
                Branch {
                    probability,
                    conditional,
                },
            ))
        })
        .collect()
}

fn weighted_fidelity<'a, T: Real + 'a>(branches: impl Iterator<Item = &'a Branch<T>>) -> Option<T> {
    let (mut weight, mut acc) = (T::zero(), T::zero());
    for b in branches {
        if let Some(c) = &b.conditional {
            weight = weight + b.probability;
            acc = acc + b.probability * c.fidelity;
        }
    }
    (weight > T::zero()).then(|| acc / weight)
}

fn finish<T: Real>(
    variant: Variant,
    n_parties: usize,
    branches: BTreeMap<HeraldPattern, Branch<T>>,
    loss: T,
) -> TransmissionOutcome<T> {
    let mut outcome = TransmissionOutcome {
        variant,
        n_parties,
        branches,
        total_success_probability: T::zero(),
        overall_fidelity_of_accepted: None,
    };
    let accepted: Vec<&Branch<T>> = outcome.accepted().map(|(_, b)| b).collect();
    let accepted_probability: T = accepted.iter().map(|b| b.probability).sum();
    let fidelity = weighted_fidelity(accepted.into_iter());
    outcome.total_success_probability = accepted_probability * loss;
    outcome.overall_fidelity_of_accepted = fidelity;
    outcome
}

/// Noisy state as received, compared against the source state.
pub fn run_passive_direct<T: Real>(spec: &ProtocolSpec<T>) -> Result<TransmissionOutcome<T>> {
    spec.expect_variant(Variant::PassiveDirect)?;
    let state = direct_state(spec)?;
    let target = spec.coeffs.target(spec.n_parties)?;
    let branches = package_branches(&state, &target, |_| HeraldPattern::Direct)?;
    Ok(finish(Variant::PassiveDirect, spec.n_parties, branches, T::one()))
}

/// Passive protocol; the accepted herald is every photon in bin 1.
pub fn run_passive_tagged<T: Real>(spec: &ProtocolSpec<T>) -> Result<TransmissionOutcome<T>> {
    spec.expect_variant(Variant::PassiveTagged)?;
    let state = passive_tagged_state(spec)?;
    let target = spec.coeffs.target(spec.n_parties)?;
    let branches = package_branches(&state, &target, |k| HeraldPattern::Bins(k.bins()))?;
    Ok(finish(Variant::PassiveTagged, spec.n_parties, branches, T::one()))
}

fn run_active_inner<T: Real>(spec: &ProtocolSpec<T>, correct_phase: bool) -> Result<TransmissionOutcome<T>> {
    spec.expect_variant(Variant::ActivePc)?;
    let state = active_state(spec, correct_phase)?;
    let target = spec.coeffs.target(spec.n_parties)?;
    let branches = package_branches(&state, &target, |k| HeraldPattern::Paths(k.paths()))?;
    let loss = pc_loss_factor(spec.eta, spec.n_parties);
    Ok(finish(Variant::ActivePc, spec.n_parties, branches, loss))
}

/// Active protocol; every path pattern is accepted.
pub fn run_active<T: Real>(spec: &ProtocolSpec<T>) -> Result<TransmissionOutcome<T>> {
    run_active_inner(spec, true)
}

/// Active protocol with the path-1 phase correction left out.
pub fn run_active_without_correction<T: Real>(spec: &ProtocolSpec<T>) -> Result<TransmissionOutcome<T>> {
    run_active_inner(spec, false)
}

/// Dispatches on `spec.variant()`.
pub fn run<T: Real>(spec: &ProtocolSpec<T>) -> Result<TransmissionOutcome<T>> {
    match spec.variant {
        Variant::PassiveDirect => run_passive_direct(spec),
        Variant::PassiveTagged => run_passive_tagged(spec),
        Variant::ActivePc => run_active(spec),
    }
}
