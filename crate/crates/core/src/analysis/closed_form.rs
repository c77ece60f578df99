//! Analytic fidelities and success probabilities.

use num_complex::Complex;

use crate::hilbert::PathLabel;
use crate::optics::{pc_loss_factor, PcEfficiency};
use crate::protocols::SourceCoefficients;
use crate::scalar::Real;

/// Two-party direct fidelity: `|cos a cos b + sin a sin b (b*a + a*b)|^2`.
pub fn closed_form_f1<T: Real>(theta_a: T, theta_b: T, coeffs: &SourceCoefficients<T>) -> T {
    let (alpha, beta) = (coeffs.alpha(), coeffs.beta());
    let cross = beta.conj() * alpha + alpha.conj() * beta;
    let amp = Complex::new(theta_a.cos() * theta_b.cos(), T::zero()) + cross * (theta_a.sin() * theta_b.sin());
    amp.norm_sqr()
}

/// The eight three-party branch weights, `lambda_1 ... lambda_8`.
///
/// Index bits (A, B, C) select sine over cosine, A most significant, so
/// `lambda[0] = cos cos cos` and `lambda[7] = sin sin sin`.
pub fn lambdas<T: Real>(theta_a: T, theta_b: T, theta_c: T) -> [T; 8] {
    let f = |bit: usize, t: T| if bit == 1 { t.sin() } else { t.cos() };
    std::array::from_fn(|k| f((k >> 2) & 1, theta_a) * f((k >> 1) & 1, theta_b) * f(k & 1, theta_c))
}

/// Three-party direct fidelity: `|lambda_1 + lambda_8 (b*a - a*b)|^2`.
pub fn closed_form_f2<T: Real>(theta_a: T, theta_b: T, theta_c: T, coeffs: &SourceCoefficients<T>) -> T {
    let (alpha, beta) = (coeffs.alpha(), coeffs.beta());
    let l = lambdas(theta_a, theta_b, theta_c);
    let amp = Complex::new(l[0], T::zero()) + (beta.conj() * alpha - alpha.conj() * beta) * l[7];
    amp.norm_sqr()
}

/// N-party direct fidelity.
///
/// Only the all-`cos` and all-`sin` terms overlap the target; the latter picks
/// up `(-1)^N` from `V -> -sin H` on every photon, which reproduces the
/// two- and three-party forms.
pub fn closed_form_direct_fidelity<T: Real>(thetas: &[T], coeffs: &SourceCoefficients<T>) -> T {
    let (alpha, beta) = (coeffs.alpha(), coeffs.beta());
    let cos: T = thetas.iter().fold(T::one(), |acc, t| acc * t.cos());
    let sin: T = thetas.iter().fold(T::one(), |acc, t| acc * t.sin());
    let sign = if thetas.len().is_multiple_of(2) {
        T::one()
    } else {
        -T::one()
    };
    let norm = alpha.norm_sqr() + beta.norm_sqr();
    let amp = Complex::new(cos * norm, T::zero()) + (beta.conj() * alpha + alpha.conj() * beta * sign) * sin;
    amp.norm_sqr()
}

/// Passive success probability, `prod cos^2 theta_i`.
pub fn closed_form_p_passive<T: Real>(thetas: &[T]) -> T {
    thetas.iter().fold(T::one(), |acc, t| acc * t.cos().powi(2))
}

/// Weight of one decoder path pattern: `cos^2` per path-2 photon, `sin^2` per path-1 photon.
pub fn closed_form_p_active_branch<T: Real>(thetas: &[T], pattern: &[PathLabel]) -> T {
    assert_eq!(thetas.len(), pattern.len(), "one path per photon");
    thetas.iter().zip(pattern).fold(T::one(), |acc, (t, p)| match p {
        PathLabel::Path2 => acc * t.cos().powi(2),
        PathLabel::Path1 => acc * t.sin().powi(2),
    })
}

/// Pockels-cell survival `eta^n`.
pub fn closed_form_loss<T: Real>(eta: T, n: usize) -> T {
    pc_loss_factor(PcEfficiency::new(eta).expect("eta in [0, 1]"), n)
}

/// Fidelity of an active branch without the path-1 `sigma_z`:
/// 1 for an even number of path-1 photons, `||alpha|^2 - |beta|^2|^2` otherwise.
pub fn closed_form_uncorrected_fidelity<T: Real>(pattern: &[PathLabel], coeffs: &SourceCoefficients<T>) -> T {
    let odd = pattern.iter().filter(|&&p| p == PathLabel::Path1).count() % 2 == 1;
    if odd {
        (coeffs.alpha().norm_sqr() - coeffs.beta().norm_sqr()).powi(2)
    } else {
        T::one()
    }
}
