use qtag_core::analysis::{sweep, verify, VerifyOptions};
use qtag_core::protocols::run;

use crate::config::{Command, OutputFormat, RunConfig};
use crate::error::CliError;
use crate::output;

/// Environment variable capping the worker-thread count.
pub const THREADS_ENV: &str = "QTAG_THREADS";

/// What a successful invocation produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub summary: String,
    /// Verification found a discrepancy.
    pub failed: bool,
    /// Extra lines for stderr.
    pub diagnostics: Vec<String>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.failed {
            2
        } else {
            0
        }
    }
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Usage(format!("`{THREADS_ENV}`: expected a positive integer, got {v:?}")))?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| CliError::Usage(format!("`{THREADS_ENV}`: {e}")))
}

pub fn execute(config: &RunConfig) -> Result<Report, CliError> {
    let json = config.output_format == OutputFormat::Json;
    let (summary, body, failed, diagnostics) = match &config.command {
        Command::Run(spec) => {
            let outcome = run(spec)?;
            let body = if json {
                output::run_json(spec, &outcome)
            } else {
                output::run_csv(&outcome)
            };
            (output::run_summary(&outcome), body, false, Vec::new())
        }
        Command::Sweep { grid, variants } => {
            let result = thread_pool()?.install(|| sweep(grid, variants))?;
            let body = if json {
                output::sweep_json(&result)
            } else {
                output::sweep_csv(&result)
            };
            (output::sweep_summary(&result), body, false, Vec::new())
        }
        Command::Verify {
            trials,
            corrupt_sigma_z,
        } => {
            let options = VerifyOptions {
                corrupt_sigma_z: *corrupt_sigma_z,
                ..VerifyOptions::default()
            };
            let report = thread_pool()?.install(|| verify::<f64>(config.seed, *trials, &options))?;
            let body = if json {
                output::verify_json(config.seed, &report)
            } else {
                output::verify_csv(&report)
            };
            let diagnostics = report.failures.iter().take(10).map(ToString::to_string).collect();
            (output::verify_summary(&report), body, !report.passed(), diagnostics)
        }
    };
    if let Some(path) = &config.output_path {
        output::write_atomic(path, &body)?;
    }
    Ok(Report {
        summary,
        failed,
        diagnostics,
    })
}
