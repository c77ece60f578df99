use std::collections::BTreeMap;

use num_complex::Complex;

use super::mode::PhotonMode;
use crate::scalar::Real;

/// What a [`ModeMap`] does with one input mode.
#[derive(Debug, Clone, PartialEq)]
pub enum ModeRule<T> {
    /// Linear image as a superposition of output modes.
    Image(Vec<(PhotonMode, Complex<T>)>),
    /// The element is not defined on this mode; any nonzero amplitude there is misuse.
    Forbidden(&'static str),
}

/// Linear map on one photon's mode space, given rule-by-rule.
///
/// Modes without a rule pass through unchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeMap<T> {
    name: &'static str,
    rules: BTreeMap<PhotonMode, ModeRule<T>>,
}

impl<T: Real> ModeMap<T> {
    pub fn new(name: &'static str) -> Self {
        Self {
            name,
            rules: BTreeMap::new(),
        }
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn map(mut self, input: PhotonMode, image: Vec<(PhotonMode, Complex<T>)>) -> Self {
        self.rules.insert(input, ModeRule::Image(image));
        self
    }

    pub fn forbid(mut self, input: PhotonMode, reason: &'static str) -> Self {
        self.rules.insert(input, ModeRule::Forbidden(reason));
        self
    }

    pub fn rule(&self, input: &PhotonMode) -> Option<&ModeRule<T>> {
        self.rules.get(input)
    }

    /// Declared domain: modes carrying an explicit image rule.
    pub fn domain(&self) -> impl Iterator<Item = &PhotonMode> {
        self.rules
            .iter()
            .filter(|(_, r)| matches!(r, ModeRule::Image(_)))
            .map(|(m, _)| m)
    }

    /// Image of a single mode; `None` when the mode is forbidden.
    pub fn image(&self, input: PhotonMode) -> Option<Vec<(PhotonMode, Complex<T>)>> {
        match self.rules.get(&input) {
            None => Some(vec![(input, Complex::new(T::one(), T::zero()))]),
            Some(ModeRule::Image(out)) => Some(out.clone()),
            Some(ModeRule::Forbidden(_)) => None,
        }
    }
}
