//! Optical elements as single-photon mode maps.
//!
//! The active decoder (PBS, the two gated Pockels cells, T_H and the output
//! PBS) is modelled by its net action. A photon whose polarization agrees with
//! its encoding tag (`H` in bin 0, `V` in bin 1) leaves on path 2 with its
//! polarization intact; a photon the channel rotated into the other
//! polarization (`V` in bin 0, `H` in bin 1) is flipped back by the cell gated
//! on its slot and leaves on path 1. The trailing T_H lines every output up in
//! bin 1:
//!
//! | input  | output        |
//! |--------|---------------|
//! | `H`    | `H_T`, path 2 |
//! | `V_T`  | `V_T`, path 2 |
//! | `V`    | `H_T`, path 1 |
//! | `H_T`  | `V_T`, path 1 |
//!
//! Path-1 outputs pick up a `-1` on the `V` branch relative to `H` (the
//! rotation puts `-sin` on `V -> H`), which is what `sigma_z_path1` undoes.

use std::f64::consts::TAU;
use std::fmt;

use crate::error::{Error, Result};
use crate::hilbert::{ModeMap, PathLabel, PhotonMode, Polarization, PureState, TimeBin};
use crate::scalar::{re, Real};

/// Effective channel angle: frame misalignment plus channel rotation.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RotationAngle<T>(T);

impl<T: Real> RotationAngle<T> {
    pub fn new(theta: T) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::Spec(format!("rotation angle {theta} is not finite")));
        }
        Ok(Self(theta))
    }

    pub fn radians(self) -> T {
        self.0
    }

    /// Representative in `[0, 2pi)`, for reporting.
    pub fn reduced(self) -> T {
        let tau = T::lit(TAU);
        let r = self.0 % tau;
        if r < T::zero() {
            r + tau
        } else {
            r
        }
    }
}

impl<T: Real> fmt::Display for RotationAngle<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Pockels-cell transmission coefficient.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PcEfficiency<T>(T);

impl<T: Real> PcEfficiency<T> {
    pub fn new(eta: T) -> Result<Self> {
        if !(eta >= T::zero() && eta <= T::one()) {
            return Err(Error::Spec(format!("PC efficiency {eta} outside [0, 1]")));
        }
        Ok(Self(eta))
    }

    pub fn ideal() -> Self {
        Self(T::one())
    }

    pub fn value(self) -> T {
        self.0
    }
}

fn each_mode_where(pred: impl Fn(&PhotonMode) -> bool) -> impl Iterator<Item = PhotonMode> {
    PhotonMode::all().filter(move |m| pred(m))
}

/// Collective rotation of the polarization basis by `theta`.
///
/// `H -> cos H + sin V`, `V -> -sin H + cos V`, on every bin and path.
pub fn rotation_map<T: Real>(theta: RotationAngle<T>) -> ModeMap<T> {
    let (s, c) = theta.radians().sin_cos();
    PhotonMode::all().fold(ModeMap::new("rotation"), |map, m| {
        let h = m.with_pol(Polarization::H);
        let v = m.with_pol(Polarization::V);
        let image = match m.pol {
            Polarization::H => vec![(h, re(c)), (v, re(s))],
            Polarization::V => vec![(h, re(-s)), (v, re(c))],
        };
        map.map(m, image)
    })
}

fn tag<T: Real>(name: &'static str, delayed: Polarization) -> ModeMap<T> {
    each_mode_where(|m| m.pol == delayed).fold(ModeMap::new(name), |map, m| match m.bin.delayed() {
        Some(bin) => map.map(m, vec![(m.with_bin(bin), re(T::one()))]),
        None => map.forbid(m, "time bin would exceed the double delay"),
    })
}

/// Delays the vertical component by one slot.
pub fn tag_v<T: Real>() -> ModeMap<T> {
    tag("T_V", Polarization::V)
}

/// Delays the horizontal component by one slot.
pub fn tag_h<T: Real>() -> ModeMap<T> {
    tag("T_H", Polarization::H)
}

/// Net map of the Pockels-cell decoder; see the module docs for the table.
pub fn active_decoder_map<T: Real>() -> ModeMap<T> {
    use PathLabel::*;
    use Polarization::*;
    let one = re(T::one());
    let out = |pol, path| PhotonMode::new(pol, TimeBin::ONE, path);
    let mut map = ModeMap::new("active decoder")
        .map(PhotonMode::new(H, TimeBin::ZERO, Path2), vec![(out(H, Path2), one)])
        .map(PhotonMode::new(V, TimeBin::ONE, Path2), vec![(out(V, Path2), one)])
        .map(PhotonMode::new(V, TimeBin::ZERO, Path2), vec![(out(H, Path1), one)])
        .map(PhotonMode::new(H, TimeBin::ONE, Path2), vec![(out(V, Path1), one)]);
    for m in each_mode_where(|m| m.path == Path1) {
        map = map.forbid(m, "photon already routed by a decoder");
    }
    for m in each_mode_where(|m| m.path == Path2 && m.bin == TimeBin::MAX) {
        map = map.forbid(m, "decoder gates only the zero and single delay slots");
    }
    map
}

/// `sigma_z` on path 1 only.
pub fn sigma_z_path1<T: Real>() -> ModeMap<T> {
    each_mode_where(|m| m.path == PathLabel::Path1 && m.pol == Polarization::V)
        .fold(ModeMap::new("sigma_z (path 1)"), |map, m| {
            map.map(m, vec![(m, re(-T::one()))])
        })
}

/// Survival factor `eta^n` of the Pockels-cell decoders.
pub fn pc_loss_factor<T: Real>(eta: PcEfficiency<T>, n_photons: usize) -> T {
    eta.value().powi(n_photons as i32)
}

/// A single element, as a label the dense cross-check can interpret independently.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Element<T> {
    Rotation(RotationAngle<T>),
    TagV,
    TagH,
    ActiveDecoder,
    SigmaZPath1,
}

impl<T: Real> Element<T> {
    pub fn mode_map(&self) -> ModeMap<T> {
        match *self {
            Element::Rotation(theta) => rotation_map(theta),
            Element::TagV => tag_v(),
            Element::TagH => tag_h(),
            Element::ActiveDecoder => active_decoder_map(),
            Element::SigmaZPath1 => sigma_z_path1(),
        }
    }

    pub fn apply(&self, state: &PureState<T>, photon: usize) -> Result<PureState<T>> {
        state.apply_single_photon_map(photon, &self.mode_map())
    }
}

/// Sequence of `(photon, element)` steps.
pub type Circuit<T> = Vec<(usize, Element<T>)>;

pub fn run_circuit<T: Real>(state: &PureState<T>, circuit: &[(usize, Element<T>)]) -> Result<PureState<T>> {
    circuit
        .iter()
        .try_fold(state.clone(), |s, (photon, el)| el.apply(&s, *photon))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::BasisKet;
    use num_complex::Complex;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};
    use Polarization::*;

    fn m(p: Polarization, bin: u8, path: PathLabel) -> PhotonMode {
        PhotonMode::new(p, TimeBin::new(bin).unwrap(), path)
    }

    fn src(p: Polarization) -> PhotonMode {
        PhotonMode::source(p)
    }

    fn single(terms: &[(PhotonMode, Complex<f64>)]) -> PureState<f64> {
        PureState::from_terms(1, terms.iter().map(|(m, a)| (BasisKet::new(vec![*m]), *a))).unwrap()
    }

    fn rot(theta: f64) -> ModeMap<f64> {
        rotation_map(RotationAngle::new(theta).unwrap())
    }

    fn r(x: f64) -> Complex<f64> {
        Complex::new(x, 0.0)
    }

    #[test]
    fn rotation_examples() {
        assert_eq!(
            rot(0.0).image(src(H)).unwrap(),
            vec![(src(H), r(1.0)), (src(V), r(0.0))]
        );

        let h = single(&[(src(H), r(1.0))]);
        let q = h.apply_single_photon_map(0, &rot(FRAC_PI_2)).unwrap();
        assert!(q.max_abs_diff(&single(&[(src(V), r(1.0))])).unwrap() < 1e-15);
        let v = single(&[(src(V), r(1.0))]);
        let q = v.apply_single_photon_map(0, &rot(FRAC_PI_2)).unwrap();
        assert!(q.max_abs_diff(&single(&[(src(H), r(-1.0))])).unwrap() < 1e-15);

        let diag = single(&[(src(H), r(FRAC_1_SQRT_2)), (src(V), r(FRAC_1_SQRT_2))]);
        let out = diag.apply_single_photon_map(0, &rot(FRAC_PI_4)).unwrap();
        assert!(out.max_abs_diff(&single(&[(src(V), r(1.0))])).unwrap() < 1e-12);
    }

    #[test]
    fn rotation_on_entangled_pair() {
        let (a, b) = (Complex::new(0.6, 0.0), Complex::new(0.0, 0.8));
        let theta: f64 = 0.37;
        let (s, c) = theta.sin_cos();
        let ket = |p: Polarization, q: Polarization| BasisKet::new(vec![src(p), src(q)]);
        let input = PureState::from_terms(2, [(ket(H, H), a), (ket(V, V), b)]).unwrap();
        let out = input.apply_single_photon_map(0, &rot(theta)).unwrap();
        let expected = PureState::from_terms(
            2,
            [
                (ket(H, H), a * c),
                (ket(V, H), a * s),
                (ket(H, V), -b * s),
                (ket(V, V), b * c),
            ],
        )
        .unwrap();
        assert!(out.max_abs_diff(&expected).unwrap() < 1e-15);
    }

    #[test]
    fn tag_examples() {
        let tv = tag_v::<f64>();
        assert_eq!(tv.image(src(V)).unwrap(), vec![(m(V, 1, PathLabel::Path2), r(1.0))]);
        assert_eq!(tv.image(src(H)).unwrap(), vec![(src(H), r(1.0))]);
        assert!(tv.image(m(V, 2, PathLabel::Path2)).is_none());

        let (a, b) = (r(0.6), r(0.8));
        let s = single(&[(src(H), a), (src(V), b)]);
        let out = s.apply_single_photon_map(0, &tv).unwrap();
        assert_eq!(out, single(&[(src(H), a), (m(V, 1, PathLabel::Path2), b)]));

        let th = tag_h::<f64>();
        assert_eq!(th.image(src(H)).unwrap(), vec![(m(H, 1, PathLabel::Path2), r(1.0))]);
        let vt = m(V, 1, PathLabel::Path2);
        assert_eq!(th.image(vt).unwrap(), vec![(vt, r(1.0))]);
    }

    #[test]
    fn tag_h_produces_double_delay_terms() {
        // cos H_T + sin V at a receiver becomes cos H_TT + sin V after T_H.
        let theta: f64 = 0.9;
        let s = single(&[(m(H, 1, PathLabel::Path2), r(theta.cos())), (src(V), r(theta.sin()))]);
        let out = s.apply_single_photon_map(0, &tag_h()).unwrap();
        let expected = single(&[(m(H, 2, PathLabel::Path2), r(theta.cos())), (src(V), r(theta.sin()))]);
        assert_eq!(out, expected);
    }

    #[test]
    fn tag_overflow_is_misuse() {
        let s = single(&[(m(H, 2, PathLabel::Path2), r(1.0))]);
        assert!(matches!(
            s.apply_single_photon_map(0, &tag_h()),
            Err(Error::ProtocolMisuse(_))
        ));
    }

    #[test]
    fn tags_commute_on_every_mode() {
        for mode in PhotonMode::all() {
            let s = single(&[(mode, r(1.0))]);
            let vh = s
                .apply_single_photon_map(0, &tag_v())
                .and_then(|x| x.apply_single_photon_map(0, &tag_h()));
            let hv = s
                .apply_single_photon_map(0, &tag_h())
                .and_then(|x| x.apply_single_photon_map(0, &tag_v()));
            assert_eq!(vh, hv, "mode {mode}");
        }
    }

    #[test]
    fn decoder_table() {
        use PathLabel::*;
        let d = active_decoder_map::<f64>();
        assert_eq!(d.image(src(H)).unwrap(), vec![(m(H, 1, Path2), r(1.0))]);
        assert_eq!(d.image(src(V)).unwrap(), vec![(m(H, 1, Path1), r(1.0))]);
        assert_eq!(d.image(m(V, 1, Path2)).unwrap(), vec![(m(V, 1, Path2), r(1.0))]);
        assert_eq!(d.image(m(H, 1, Path2)).unwrap(), vec![(m(V, 1, Path1), r(1.0))]);
        assert!(d.image(m(H, 2, Path2)).is_none());
        assert!(d.image(m(H, 0, Path1)).is_none());
    }

    #[test]
    fn decoder_is_bijection_into_bin_one() {
        let d = active_decoder_map::<f64>();
        let mut images: Vec<PhotonMode> = d
            .domain()
            .map(|m| {
                let img = d.image(*m).unwrap();
                assert_eq!(img.len(), 1);
                assert_eq!(img[0].1, r(1.0));
                img[0].0
            })
            .collect();
        assert_eq!(images.len(), 4);
        assert!(images.iter().all(|m| m.bin == TimeBin::ONE));
        images.sort();
        images.dedup();
        assert_eq!(images.len(), 4);
    }

    #[test]
    fn sigma_z_examples() {
        let vt1 = m(V, 1, PathLabel::Path1);
        let vt2 = m(V, 1, PathLabel::Path2);
        let sz = sigma_z_path1::<f64>();
        assert_eq!(sz.image(vt1).unwrap(), vec![(vt1, r(-1.0))]);
        assert_eq!(sz.image(vt2).unwrap(), vec![(vt2, r(1.0))]);
        let h1 = m(H, 1, PathLabel::Path1);
        assert_eq!(sz.image(h1).unwrap(), vec![(h1, r(1.0))]);
    }

    #[test]
    fn pc_loss_examples() {
        let ideal = PcEfficiency::<f64>::ideal();
        for n in 1..6 {
            assert_eq!(pc_loss_factor(ideal, n), 1.0);
        }
        let eta = PcEfficiency::<f64>::new(0.988).unwrap();
        assert!((pc_loss_factor(eta, 2) - 0.976144).abs() < 1e-12);
        assert!((pc_loss_factor(eta, 3) - 0.964430272).abs() < 1e-12);
    }

    #[test]
    fn invalid_parameters() {
        assert!(RotationAngle::new(f64::NAN).is_err());
        assert!(RotationAngle::new(f64::INFINITY).is_err());
        assert!(PcEfficiency::new(1.01).is_err());
        assert!(PcEfficiency::new(-0.1).is_err());
    }

    #[test]
    fn reduced_angle() {
        let a = RotationAngle::new(-PI / 2.0).unwrap();
        assert!((a.reduced() - 1.5 * PI).abs() < 1e-15);
        assert_eq!(a.radians(), -PI / 2.0);
    }

    proptest! {
        #[test]
        fn rotation_composition(t1 in -7.0f64..7.0, t2 in -7.0f64..7.0, re0 in -1.0f64..1.0, im1 in -1.0f64..1.0) {
            let mode_h = m(H, 1, PathLabel::Path1);
            let s = single(&[(mode_h, r(re0)), (mode_h.with_pol(V), Complex::new(0.2, im1))]);
            let two = s.apply_single_photon_map(0, &rot(t1)).unwrap()
                .apply_single_photon_map(0, &rot(t2)).unwrap();
            let one = s.apply_single_photon_map(0, &rot(t1 + t2)).unwrap();
            prop_assert!(two.max_abs_diff(&one).unwrap() <= 1e-12);
        }

        #[test]
        fn rotation_preserves_norm(t in -10.0f64..10.0, a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0) {
            let s = single(&[(src(H), Complex::new(a, b)), (src(V), r(c))]);
            let out = s.apply_single_photon_map(0, &rot(t)).unwrap();
            prop_assert!((out.norm_squared() - s.norm_squared()).abs() <= 1e-12);
        }
    }
}
