//! Serialization of run, sweep and verify results.
//!
//! Floats in CSV use 17 significant digits, so reading a file back yields the
//! exact `f64` values that were written. JSON uses serde_json's shortest
//! round-trip formatting. Map keys are emitted in sorted order, which keeps the
//! output byte-identical across runs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use qtag_core::analysis::{Provenance, SweepResult, VerifyReport, COLUMN_NAMES};
use qtag_core::protocols::{ProtocolSpec, TransmissionOutcome};

use crate::error::CliError;

pub const SWEEP_HEADER: &str = "theta,F1_direct,F2_direct,F_scheme,P1_passive,P2_passive,P_active_total";
pub const RUN_HEADER: &str = "pattern,accepted,probability,fidelity";

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Serialize)]
struct ComplexOut {
    re: f64,
    im: f64,
}

impl From<Complex64> for ComplexOut {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

#[derive(Serialize)]
struct TermOut {
    ket: String,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct BranchOut {
    accepted: bool,
    probability: f64,
    fidelity: Option<f64>,
    state: Option<Vec<TermOut>>,
}

#[derive(Serialize)]
struct RunOut {
    protocol: &'static str,
    n_parties: usize,
    alpha: ComplexOut,
    beta: ComplexOut,
    theta: Vec<f64>,
    eta: f64,
    total_success_probability: f64,
    overall_fidelity_of_accepted: Option<f64>,
    branches: BTreeMap<String, BranchOut>,
}

pub fn run_summary(outcome: &TransmissionOutcome<f64>) -> String {
    let f = outcome
        .overall_fidelity_of_accepted
        .map_or_else(|| "nan".to_owned(), |f| format!("{f:.6}"));
    format!("P={:.6} F={f}", outcome.total_success_probability)
}

pub fn run_json(spec: &ProtocolSpec<f64>, outcome: &TransmissionOutcome<f64>) -> String {
    let branches = outcome
        .branches
        .iter()
        .map(|(pattern, branch)| {
            let state = branch.conditional.as_ref().map(|c| {
                c.state
                    .iter()
                    .map(|(ket, a)| TermOut {
                        ket: ket.to_string(),
                        re: a.re,
                        im: a.im,
                    })
                    .collect()
            });
            let out = BranchOut {
                accepted: outcome.is_accepted(pattern),
                probability: branch.probability,
                fidelity: branch.fidelity(),
                state,
            };
            (pattern.to_string(), out)
        })
        .collect();
    let doc = RunOut {
        protocol: spec.variant().name(),
        n_parties: spec.n_parties(),
        alpha: spec.coeffs().alpha().into(),
        beta: spec.coeffs().beta().into(),
        theta: spec.thetas().iter().map(|t| t.radians()).collect(),
        eta: spec.eta().value(),
        total_success_probability: outcome.total_success_probability,
        overall_fidelity_of_accepted: outcome.overall_fidelity_of_accepted,
        branches,
    };
    pretty(&doc)
}

pub fn run_csv(outcome: &TransmissionOutcome<f64>) -> String {
    let mut s = format!("{RUN_HEADER}\n");
    for (pattern, branch) in &outcome.branches {
        let fid = branch.fidelity().map_or_else(String::new, num);
        let _ = writeln!(
            s,
            "{pattern},{},{},{fid}",
            outcome.is_accepted(pattern),
            num(branch.probability)
        );
    }
    s
}

pub fn sweep_summary(result: &SweepResult<f64>) -> String {
    format!(
        "rows={} max_disagreement={:.3e} max_herald_defect={:.3e}",
        result.rows.len(),
        result.max_disagreement(),
        result.max_herald_defect()
    )
}

pub fn sweep_csv(result: &SweepResult<f64>) -> String {
    let mut s = format!("{SWEEP_HEADER}\n");
    for row in &result.rows {
        s.push_str(&num(row.theta));
        for v in row.values().to_array() {
            s.push(',');
            s.push_str(&num(v));
        }
        s.push('\n');
    }
    s
}

/// Parses text written by [`sweep_csv`] into `[theta, columns...]` rows.
pub fn read_sweep_csv(text: &str) -> Result<Vec<[f64; 7]>, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == SWEEP_HEADER => {}
        other => return Err(format!("unexpected header {other:?}")),
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let fields: Vec<f64> = line
                .split(',')
                .map(|f| f.parse::<f64>().map_err(|e| format!("row {}: {e}", i + 1)))
                .collect::<Result<_, _>>()?;
            fields
                .try_into()
                .map_err(|v: Vec<f64>| format!("row {}: {} fields", i + 1, v.len()))
        })
        .collect()
}

#[derive(Serialize)]
struct GridOut {
    theta_min: f64,
    theta_max: f64,
    steps: usize,
    alpha: ComplexOut,
    beta: ComplexOut,
    eta: f64,
}

#[derive(Serialize)]
struct SweepRowOut {
    theta: f64,
    values: BTreeMap<&'static str, f64>,
    closed_form: BTreeMap<&'static str, f64>,
    disagreement: f64,
    herald_defect: f64,
}

#[derive(Serialize)]
struct SweepOut {
    grid: GridOut,
    variants: Vec<&'static str>,
    provenance: BTreeMap<&'static str, &'static str>,
    max_disagreement: f64,
    max_herald_defect: f64,
    rows: Vec<SweepRowOut>,
}

fn columns(values: [f64; 6]) -> BTreeMap<&'static str, f64> {
    COLUMN_NAMES.into_iter().zip(values).collect()
}

pub fn sweep_json(result: &SweepResult<f64>) -> String {
    let g = &result.grid;
    let doc = SweepOut {
        grid: GridOut {
            theta_min: g.theta_min(),
            theta_max: g.theta_max(),
            steps: g.steps(),
            alpha: g.coeffs().alpha().into(),
            beta: g.coeffs().beta().into(),
            eta: g.eta().value(),
        },
        variants: result.variants.iter().map(|v| v.name()).collect(),
        provenance: COLUMN_NAMES
            .into_iter()
            .zip(result.provenance.to_array())
            .map(|(k, p)| {
                let p = match p {
                    Provenance::Simulated => "simulated",
                    Provenance::ClosedForm => "closed-form",
                };
                (k, p)
            })
            .collect(),
        max_disagreement: result.max_disagreement(),
        max_herald_defect: result.max_herald_defect(),
        rows: result
            .rows
            .iter()
            .map(|r| SweepRowOut {
                theta: r.theta,
                values: columns(r.values().to_array()),
                closed_form: columns(r.closed_form.to_array()),
                disagreement: r.disagreement,
                herald_defect: r.herald_defect,
            })
            .collect(),
    };
    pretty(&doc)
}

#[derive(Serialize)]
struct FailureOut<'a> {
    trial: usize,
    spec: &'a str,
    quantity: &'a str,
    error: f64,
}

#[derive(Serialize)]
struct VerifyOut<'a> {
    seed: u64,
    passed: bool,
    trials: usize,
    checks: usize,
    tolerance: f64,
    max_disagreement: f64,
    failures: Vec<FailureOut<'a>>,
}

pub fn verify_summary(report: &VerifyReport) -> String {
    format!(
        "{} trials={} checks={} max_disagreement={:.3e} tolerance={:e}",
        if report.passed() { "PASS" } else { "FAIL" },
        report.trials,
        report.checks,
        report.max_disagreement,
        report.tolerance
    )
}

pub fn verify_json(seed: u64, report: &VerifyReport) -> String {
    let doc = VerifyOut {
        seed,
        passed: report.passed(),
        trials: report.trials,
        checks: report.checks,
        tolerance: report.tolerance,
        max_disagreement: report.max_disagreement,
        failures: report
            .failures
            .iter()
            .map(|d| FailureOut {
                trial: d.trial,
                spec: &d.spec,
                quantity: &d.quantity,
                error: d.error,
            })
            .collect(),
    };
    pretty(&doc)
}

/// One row per failed check; a passing report is just the header.
pub fn verify_csv(report: &VerifyReport) -> String {
    let mut s = String::from("trial,quantity,error,spec\n");
    for d in &report.failures {
        let _ = writeln!(
            s,
            "{},{},{},\"{}\"",
            d.trial,
            d.quantity,
            num(d.error),
            d.spec.replace('"', "\"\"")
        );
    }
    s
}

fn pretty<S: Serialize>(doc: &S) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("output types serialize infallibly");
    s.push('\n');
    s
}

/// Writes `contents` to a temporary file beside `path`, then renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
