//! Misalignment-angle sweeps with every party sharing the same angle.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::closed_form::{closed_form_f1, closed_form_f2, closed_form_loss, closed_form_p_passive};
use crate::error::{Error, Result};
use crate::optics::{PcEfficiency, RotationAngle};
use crate::protocols::{
    run_active, run_passive_direct, run_passive_tagged, ProtocolSpec, SourceCoefficients, TransmissionOutcome, Variant,
};
use crate::scalar::Real;

/// CSV/JSON column names, in row order after `theta`.
pub const COLUMN_NAMES: [&str; 6] = [
    "F1_direct",
    "F2_direct",
    "F_scheme",
    "P1_passive",
    "P2_passive",
    "P_active_total",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid<T> {
    theta_min: T,
    theta_max: T,
    steps: usize,
    coeffs: SourceCoefficients<T>,
    eta: PcEfficiency<T>,
}

impl<T: Real> SweepGrid<T> {
    pub fn new(
        theta_min: T,
        theta_max: T,
        steps: usize,
        coeffs: SourceCoefficients<T>,
        eta: PcEfficiency<T>,
    ) -> Result<Self> {
        if !(theta_min.is_finite() && theta_max.is_finite() && theta_min < theta_max) {
            return Err(Error::Spec(format!(
                "grid needs theta_min < theta_max, got {theta_min}..{theta_max}"
            )));
        }
        if steps < 2 {
            return Err(Error::Spec(format!("grid needs at least 2 steps, got {steps}")));
        }
        Ok(Self {
            theta_min,
            theta_max,
            steps,
            coeffs,
            eta,
        })
    }

    /// 101 points on `[0, pi]`, reference coefficients, ideal Pockels cells.
    pub fn reference() -> Self {
        Self::new(
            T::zero(),
            T::lit(PI),
            101,
            SourceCoefficients::reference(),
            PcEfficiency::ideal(),
        )
        .expect("valid")
    }

    pub fn with_eta(self, eta: PcEfficiency<T>) -> Self {
        Self { eta, ..self }
    }

    pub fn theta_min(&self) -> T {
        self.theta_min
    }

    pub fn theta_max(&self) -> T {
        self.theta_max
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn coeffs(&self) -> &SourceCoefficients<T> {
        &self.coeffs
    }

    pub fn eta(&self) -> PcEfficiency<T> {
        self.eta
    }

    pub fn thetas(&self) -> Vec<T> {
        let span = self.theta_max - self.theta_min;
        let last = T::from_usize(self.steps - 1).expect("step count");
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.theta_max
                } else {
                    self.theta_min + span * T::from_usize(i).expect("step index") / last
                }
            })
            .collect()
    }
}

/// One value per output column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Columns<V> {
    pub f1_direct: V,
    pub f2_direct: V,
    pub f_scheme: V,
    pub p1_passive: V,
    pub p2_passive: V,
    pub p_active_total: V,
}

impl<V: Copy> Columns<V> {
    pub fn to_array(&self) -> [V; 6] {
        [
            self.f1_direct,
            self.f2_direct,
            self.f_scheme,
            self.p1_passive,
            self.p2_passive,
            self.p_active_total,
        ]
    }

    pub fn from_array(a: [V; 6]) -> Self {
        Self {
            f1_direct: a[0],
            f2_direct: a[1],
            f_scheme: a[2],
            p1_passive: a[3],
            p2_passive: a[4],
            p_active_total: a[5],
        }
    }

    pub fn map<W: Copy>(&self, f: impl Fn(V) -> W) -> Columns<W> {
        Columns::from_array(self.to_array().map(f))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Simulated,
    ClosedForm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow<T> {
    pub theta: T,
    /// `None` where the column's pipeline was not requested.
    pub simulated: Columns<Option<T>>,
    pub closed_form: Columns<T>,
    /// Max over columns of `|simulated - closed form|`.
    pub disagreement: T,
    /// Max over the simulated runs of `|sum of herald probabilities - 1|`.
    pub herald_defect: T,
}

impl<T: Real> SweepRow<T> {
    /// Simulated values where present, closed forms elsewhere.
    pub fn values(&self) -> Columns<T> {
        let s = self.simulated.to_array();
        let c = self.closed_form.to_array();
        Columns::from_array(std::array::from_fn(|i| s[i].unwrap_or(c[i])))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult<T> {
    pub grid: SweepGrid<T>,
    pub variants: Vec<Variant>,
    pub provenance: Columns<Provenance>,
    pub rows: Vec<SweepRow<T>>,
}

impl<T: Real> SweepResult<T> {
    pub fn max_disagreement(&self) -> T {
        self.rows.iter().map(|r| r.disagreement).fold(T::zero(), T::max)
    }

    pub fn max_herald_defect(&self) -> T {
        self.rows.iter().map(|r| r.herald_defect).fold(T::zero(), T::max)
    }
}

fn provenance(variants: &[Variant]) -> Columns<Provenance> {
    let p = |v: &[Variant]| {
        if v.iter().any(|x| variants.contains(x)) {
            Provenance::Simulated
        } else {
            Provenance::ClosedForm
        }
    };
    Columns {
        f1_direct: p(&[Variant::PassiveDirect]),
        f2_direct: p(&[Variant::PassiveDirect]),
        f_scheme: p(&[Variant::PassiveTagged, Variant::ActivePc]),
        p1_passive: p(&[Variant::PassiveTagged]),
        p2_passive: p(&[Variant::PassiveTagged]),
        p_active_total: p(&[Variant::ActivePc]),
    }
}

struct RowRuns<T> {
    direct: Option<[TransmissionOutcome<T>; 2]>,
    tagged: Option<[TransmissionOutcome<T>; 2]>,
    active: Option<[TransmissionOutcome<T>; 2]>,
}

fn sweep_row<T: Real>(grid: &SweepGrid<T>, variants: &[Variant], theta: T) -> Result<SweepRow<T>> {
    let angle = RotationAngle::new(theta)?;
    let spec = |variant, n| ProtocolSpec::new(variant, grid.coeffs, vec![angle; n], grid.eta);
    let pair = |variant: Variant,
                run: fn(&ProtocolSpec<T>) -> Result<TransmissionOutcome<T>>|
     -> Result<Option<[TransmissionOutcome<T>; 2]>> {
        if !variants.contains(&variant) {
            return Ok(None);
        }
        Ok(Some([run(&spec(variant, 2)?)?, run(&spec(variant, 3)?)?]))
    };
    let runs = RowRuns {
        direct: pair(Variant::PassiveDirect, run_passive_direct)?,
        tagged: pair(Variant::PassiveTagged, run_passive_tagged)?,
        active: pair(Variant::ActivePc, run_active)?,
    };

    let closed_form = Columns {
        f1_direct: closed_form_f1(theta, theta, &grid.coeffs),
        f2_direct: closed_form_f2(theta, theta, theta, &grid.coeffs),
        f_scheme: T::one(),
        p1_passive: closed_form_p_passive(&[theta; 2]),
        p2_passive: closed_form_p_passive(&[theta; 3]),
        p_active_total: closed_form_loss(grid.eta.value(), 2),
    };

    // Scheme fidelity: worst renormalizable accepted branch of any scheme run.
    let scheme_runs: Vec<&TransmissionOutcome<T>> = runs
        .tagged
        .iter()
        .chain(runs.active.iter())
        .flat_map(|p| p.iter())
        .collect();
    let f_scheme = (!scheme_runs.is_empty()).then(|| {
        scheme_runs
            .iter()
            .flat_map(|o| o.accepted().filter_map(|(_, b)| b.fidelity()))
            .fold(T::one(), T::min)
    });

    let simulated = Columns {
        f1_direct: runs.direct.as_ref().and_then(|d| d[0].overall_fidelity_of_accepted),
        f2_direct: runs.direct.as_ref().and_then(|d| d[1].overall_fidelity_of_accepted),
        f_scheme,
        p1_passive: runs.tagged.as_ref().map(|t| t[0].total_success_probability),
        p2_passive: runs.tagged.as_ref().map(|t| t[1].total_success_probability),
        p_active_total: runs.active.as_ref().map(|a| a[0].total_success_probability),
    };

    let disagreement = simulated
        .to_array()
        .iter()
        .zip(closed_form.to_array())
        .filter_map(|(s, c)| s.map(|s| (s - c).abs()))
        .fold(T::zero(), T::max);

    let herald_defect = [&runs.direct, &runs.tagged, &runs.active]
        .into_iter()
        .flatten()
        .flat_map(|p| p.iter())
        .map(|o| (o.branch_probability_sum() - T::one()).abs())
        .fold(T::zero(), T::max);

    Ok(SweepRow {
        theta,
        simulated,
        closed_form,
        disagreement,
        herald_defect,
    })
}

/// Runs the requested pipelines and the closed forms at every grid angle.
///
/// Rows are evaluated in parallel on the current rayon pool and returned in grid order.
pub fn sweep<T: Real>(grid: &SweepGrid<T>, variants: &[Variant]) -> Result<SweepResult<T>> {
    let rows = grid
        .thetas()
        .into_par_iter()
        .map(|theta| sweep_row(grid, variants, theta))
        .collect::<Result<Vec<_>>>()?;
    let mut variants = variants.to_vec();
    variants.sort();
    variants.dedup();
    Ok(SweepResult {
        grid: grid.clone(),
        provenance: provenance(&variants),
        variants,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn grid_validation() {
        let c = SourceCoefficients::<f64>::reference();
        let eta = PcEfficiency::ideal();
        assert!(SweepGrid::new(1.0, 0.5, 10, c, eta).is_err());
        assert!(SweepGrid::new(0.0, 1.0, 1, c, eta).is_err());
        let g = SweepGrid::new(0.0, 1.0, 5, c, eta).unwrap();
        assert_eq!(g.thetas(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn reference_sweep_shape() {
        let r = sweep(&SweepGrid::<f64>::reference(), &Variant::ALL).unwrap();
        assert_eq!(r.rows.len(), 101);
        assert_eq!(r.rows[0].theta, 0.0);
        assert_eq!(r.rows[100].theta, PI);
        assert!(r.max_disagreement() <= 1e-12);
        assert!(r.max_herald_defect() <= 1e-12);
        for row in &r.rows {
            assert!((row.simulated.f_scheme.unwrap() - 1.0).abs() <= 1e-12);
            assert!((row.simulated.p_active_total.unwrap() - 1.0).abs() <= 1e-12);
        }
        let p1: Vec<f64> = r.rows.iter().map(|row| row.simulated.p1_passive.unwrap()).collect();
        assert!((p1[0] - 1.0).abs() < 1e-12);
        assert!(p1[50].abs() < 1e-12);
        assert!((r.rows[50].theta - FRAC_PI_2).abs() < 1e-15);
        assert!(p1[..=50].windows(2).all(|w| w[1] < w[0]));
        assert!(p1[50..].windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn unrequested_columns_fall_back_to_closed_form() {
        let r = sweep(&SweepGrid::<f64>::reference(), &[Variant::PassiveTagged]).unwrap();
        assert_eq!(r.provenance.f1_direct, Provenance::ClosedForm);
        assert_eq!(r.provenance.p1_passive, Provenance::Simulated);
        let row = &r.rows[10];
        assert_eq!(row.simulated.f1_direct, None);
        assert_eq!(row.values().f1_direct, row.closed_form.f1_direct);
    }
}
