//! Three-way cross-check: sparse simulator, dense oracle, closed forms.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::closed_form::{
    closed_form_direct_fidelity, closed_form_f1, closed_form_f2, closed_form_loss, closed_form_p_active_branch,
    closed_form_p_passive, closed_form_uncorrected_fidelity,
};
use crate::error::Result;
use crate::hilbert::{PathLabel, TimeBin};
use crate::oracle::{dense_active, dense_direct, dense_passive_tagged, Digits};
use crate::protocols::{
    active_state, direct_state, passive_tagged_state, run_active, run_active_without_correction, run_passive_direct,
    run_passive_tagged, HeraldPattern, ProtocolSpec, TransmissionOutcome, Variant,
};
use crate::sampling::random_spec;
use crate::scalar::Real;

pub const DEFAULT_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_TRIALS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub tolerance: f64,
    /// Mutation hook: feed the uncorrected active pipeline to the checks that
    /// expect the corrected one. A sound harness must then fail.
    pub corrupt_sigma_z: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TOLERANCE,
            corrupt_sigma_z: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Discrepancy {
    pub trial: usize,
    pub spec: String,
    pub quantity: String,
    pub error: f64,
}

impl fmt::Display for Discrepancy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "trial {}: {} off by {:e} for {}",
            self.trial, self.quantity, self.error, self.spec
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub trials: usize,
    pub checks: usize,
    pub tolerance: f64,
    pub max_disagreement: f64,
    pub failures: Vec<Discrepancy>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

struct Checker<'a> {
    trial: usize,
    spec: String,
    options: &'a VerifyOptions,
    checks: usize,
    worst: f64,
    failures: Vec<Discrepancy>,
}

impl Checker<'_> {
    fn check<T: Real>(&mut self, quantity: impl FnOnce() -> String, got: T, expected: T) {
        let err = (got - expected).abs().to_f64().unwrap_or(f64::INFINITY);
        let err = if err.is_nan() { f64::INFINITY } else { err };
        self.checks += 1;
        self.worst = self.worst.max(err);
        if err > self.options.tolerance {
            self.failures.push(Discrepancy {
                trial: self.trial,
                spec: self.spec.clone(),
                quantity: quantity(),
                error: err,
            });
        }
    }
}

fn path_label(d: &Digits) -> PathLabel {
    if d.path == 0 {
        PathLabel::Path1
    } else {
        PathLabel::Path2
    }
}

fn thetas<T: Real>(spec: &ProtocolSpec<T>) -> Vec<T> {
    spec.thetas().iter().map(|t| t.radians()).collect()
}

fn check_heralds<T: Real>(c: &mut Checker, name: &str, outcome: &TransmissionOutcome<T>) {
    c.check(
        || format!("{name} herald completeness"),
        outcome.branch_probability_sum(),
        T::one(),
    );
}

fn check_spec<T: Real>(c: &mut Checker, spec: &ProtocolSpec<T>) -> Result<()> {
    let n = spec.n_parties();
    let angles = thetas(spec);
    let coeffs = spec.coeffs();

    // Direct transmission.
    let direct = spec.with_variant(Variant::PassiveDirect);
    let sparse = direct_state(&direct)?;
    c.check(
        || "direct amplitudes vs dense".into(),
        dense_direct(&direct)?.max_abs_diff_sparse(&sparse)?,
        T::zero(),
    );
    let out = run_passive_direct(&direct)?;
    check_heralds(c, "direct", &out);
    if let Some(f) = out.overall_fidelity_of_accepted {
        c.check(
            || "direct fidelity (N-party form)".into(),
            f,
            closed_form_direct_fidelity(&angles, coeffs),
        );
        match n {
            2 => c.check(
                || "direct fidelity F1".into(),
                f,
                closed_form_f1(angles[0], angles[1], coeffs),
            ),
            3 => c.check(
                || "direct fidelity F2".into(),
                f,
                closed_form_f2(angles[0], angles[1], angles[2], coeffs),
            ),
            _ => {}
        }
    }

    // Passive tagged.
    let tagged = spec.with_variant(Variant::PassiveTagged);
    let sparse = passive_tagged_state(&tagged)?;
    let dense = dense_passive_tagged(&tagged)?;
    c.check(
        || "tagged amplitudes vs dense".into(),
        dense.max_abs_diff_sparse(&sparse)?,
        T::zero(),
    );
    let out = run_passive_tagged(&tagged)?;
    check_heralds(c, "tagged", &out);
    c.check(
        || "tagged success probability".into(),
        out.total_success_probability,
        closed_form_p_passive(&angles),
    );
    for (pattern, w) in dense.weights_by(|ds| ds.iter().map(|d| d.bin).collect::<Vec<_>>()) {
        let key = HeraldPattern::Bins(
            pattern
                .iter()
                .map(|&b| TimeBin::new(b as u8).expect("bin <= 2"))
                .collect(),
        );
        let got = out.branch(&key).map_or(T::zero(), |b| b.probability);
        c.check(|| format!("tagged branch {key} probability vs dense"), got, w);
    }
    for (pattern, branch) in out.accepted() {
        if let Some(f) = branch.fidelity() {
            c.check(|| format!("tagged accepted fidelity [{pattern}]"), f, T::one());
        }
    }

    // Active, corrected (or deliberately not).
    let active = spec.with_variant(Variant::ActivePc);
    let corrected = !c.options.corrupt_sigma_z;
    let sparse = active_state(&active, corrected)?;
    let dense = dense_active(&active, true)?;
    c.check(
        || "active amplitudes vs dense".into(),
        dense.max_abs_diff_sparse(&sparse)?,
        T::zero(),
    );
    let out = if corrected {
        run_active(&active)?
    } else {
        run_active_without_correction(&active)?
    };
    check_heralds(c, "active", &out);
    c.check(
        || "active total success".into(),
        out.total_success_probability,
        closed_form_loss(active.eta().value(), n),
    );
    let dense_weights = dense.weights_by(|ds| ds.iter().map(path_label).collect::<Vec<_>>());
    for (paths, w) in &dense_weights {
        let key = HeraldPattern::Paths(paths.clone());
        let got = out.branch(&key).map_or(T::zero(), |b| b.probability);
        c.check(|| format!("active branch {key} probability vs dense"), got, *w);
        c.check(
            || format!("active branch {key} probability vs closed form"),
            got,
            closed_form_p_active_branch(&angles, paths),
        );
    }
    for (pattern, branch) in &out.branches {
        if let Some(f) = branch.fidelity() {
            c.check(|| format!("active fidelity [{pattern}]"), f, T::one());
        }
    }

    // Uncorrected active against its own closed form.
    let raw = run_active_without_correction(&active)?;
    for (pattern, branch) in &raw.branches {
        if let (Some(f), HeraldPattern::Paths(paths)) = (branch.fidelity(), pattern) {
            c.check(
                || format!("uncorrected fidelity [{pattern}]"),
                f,
                closed_form_uncorrected_fidelity(paths, coeffs),
            );
        }
    }
    Ok(())
}

/// Verifies explicit specs; each spec is checked under every variant.
pub fn verify_specs<T: Real>(specs: &[ProtocolSpec<T>], options: &VerifyOptions) -> Result<VerifyReport> {
    let mut report = VerifyReport {
        trials: specs.len(),
        checks: 0,
        tolerance: options.tolerance,
        max_disagreement: 0.0,
        failures: Vec::new(),
    };
    for (trial, spec) in specs.iter().enumerate() {
        let mut c = Checker {
            trial,
            spec: spec.to_string(),
            options,
            checks: 0,
            worst: 0.0,
            failures: Vec::new(),
        };
        check_spec(&mut c, spec)?;
        report.checks += c.checks;
        report.max_disagreement = report.max_disagreement.max(c.worst);
        report.failures.extend(c.failures);
    }
    Ok(report)
}

/// Samples `trials` random specs (2 to 4 parties, complex coefficients,
/// arbitrary angles) from `seed` and verifies them.
pub fn verify<T: Real>(seed: u64, trials: usize, options: &VerifyOptions) -> Result<VerifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let specs: Vec<ProtocolSpec<T>> = (0..trials)
        .map(|_| random_spec(&mut rng, Variant::ActivePc, &[2, 3, 4]))
        .collect();
    verify_specs(&specs, options)
}
