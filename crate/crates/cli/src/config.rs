//! Command-line and config-file parsing into a validated [`RunConfig`].

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Deserialize;

use qtag_core::analysis::{SweepGrid, DEFAULT_TRIALS};
use qtag_core::optics::{PcEfficiency, RotationAngle};
use qtag_core::protocols::{ProtocolSpec, SourceCoefficients, Variant};

use crate::error::CliError;

/// Largest `||alpha|^2 + |beta|^2 - 1|` accepted on input; the pair is then renormalized.
pub const COEFF_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Parser)]
#[command(name = "qtag", version, about = "Alignment-free entanglement transmission simulator")]
struct Cli {
    #[command(subcommand)]
    command: CommandArgs,
}

#[derive(Debug, Subcommand)]
enum CommandArgs {
    /// Run one protocol and report its herald branches.
    Run(RunArgs),
    /// Sweep a shared misalignment angle and tabulate fidelities and efficiencies.
    Sweep(SweepArgs),
    /// Cross-check simulator, dense oracle and closed forms on random specs.
    Verify(VerifyArgs),
}

#[derive(Debug, Args, Default)]
struct CommonArgs {
    /// JSON file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Source amplitude on |H...H>, real or complex (e.g. 0.6, 0.3+0.4i).
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Source amplitude on |V...V>.
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    /// Pockels-cell transmission coefficient.
    #[arg(long)]
    eta: Option<f64>,
    /// Output file, written atomically.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json; defaults to the output file's extension, then csv.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// passive-direct, passive-tagged or active.
    #[arg(long)]
    protocol: Option<String>,
    /// Number of parties; inferred from --theta when omitted.
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated per-party angles in radians or with a `pi` suffix (0.25pi).
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// min:max:steps, angles in radians or with a `pi` suffix.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Comma-separated pipelines to simulate; the rest come from closed forms.
    #[arg(long)]
    variants: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    trials: Option<usize>,
    /// Drop the path-1 sigma_z from the checked active pipeline (mutation test).
    #[arg(long, hide = true)]
    corrupt_sigma_z: bool,
    #[command(flatten)]
    common: CommonArgs,
}

/// A JSON value that may be written as a number or a string.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Scalar {
    Number(f64),
    Text(String),
}

impl Scalar {
    fn text(self) -> String {
        match self {
            Scalar::Number(x) => format!("{x:?}"),
            Scalar::Text(s) => s,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum ScalarList {
    One(Scalar),
    Many(Vec<Scalar>),
}

impl ScalarList {
    fn text(self) -> String {
        match self {
            ScalarList::One(s) => s.text(),
            ScalarList::Many(v) => v.into_iter().map(Scalar::text).collect::<Vec<_>>().join(","),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    protocol: Option<String>,
    n: Option<usize>,
    theta: Option<ScalarList>,
    alpha: Option<Scalar>,
    beta: Option<Scalar>,
    eta: Option<f64>,
    grid: Option<String>,
    variants: Option<ScalarList>,
    out: Option<PathBuf>,
    format: Option<String>,
    seed: Option<u64>,
    trials: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Run(ProtocolSpec<f64>),
    Sweep {
        grid: SweepGrid<f64>,
        variants: Vec<Variant>,
    },
    Verify {
        trials: usize,
        corrupt_sigma_z: bool,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub output_path: Option<PathBuf>,
    pub output_format: OutputFormat,
    pub seed: u64,
}

fn usage(key: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("`{key}`: {msg}"))
}

/// Parses `0.25pi`, `pi`, `-pi`, or a plain number of radians.
pub fn parse_angle(key: &str, text: &str) -> Result<f64, CliError> {
    let t = text.trim();
    let value = match t.strip_suffix("pi") {
        Some(coef) => {
            let coef = coef.trim();
            let k = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => f64::from_str(c).map_err(|_| usage(key, format!("malformed angle {text:?}")))?,
            };
            k * PI
        }
        None => f64::from_str(t).map_err(|_| usage(key, format!("malformed angle {text:?}")))?,
    };
    if !value.is_finite() {
        return Err(usage(key, format!("angle {text:?} is not finite")));
    }
    Ok(value)
}

fn parse_angles(key: &str, text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',').map(|t| parse_angle(key, t)).collect()
}

pub fn parse_complex(key: &str, text: &str) -> Result<Complex64, CliError> {
    let z = Complex64::from_str(text.trim()).map_err(|_| usage(key, format!("malformed number {text:?}")))?;
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(usage(key, format!("{text:?} is not finite")));
    }
    Ok(z)
}

fn parse_protocol(text: &str) -> Result<Variant, CliError> {
    Variant::ALL
        .into_iter()
        .find(|v| v.name() == text.trim())
        .ok_or_else(|| {
            usage(
                "protocol",
                format!("unknown protocol {text:?}; expected passive-direct, passive-tagged or active"),
            )
        })
}

fn parse_grid(text: &str) -> Result<(f64, f64, usize), CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    let [min, max, steps] = parts.as_slice() else {
        return Err(usage("grid", format!("expected min:max:steps, got {text:?}")));
    };
    let steps = usize::from_str(steps.trim()).map_err(|_| usage("grid", format!("malformed step count {steps:?}")))?;
    Ok((parse_angle("grid", min)?, parse_angle("grid", max)?, steps))
}

fn coefficients(alpha: Option<String>, beta: Option<String>) -> Result<SourceCoefficients<f64>, CliError> {
    if alpha.is_none() && beta.is_none() {
        return Ok(SourceCoefficients::reference());
    }
    let alpha = parse_complex(
        "alpha",
        alpha
            .as_deref()
            .ok_or_else(|| usage("alpha", "required when beta is given"))?,
    )?;
    let beta = parse_complex(
        "beta",
        beta.as_deref()
            .ok_or_else(|| usage("beta", "required when alpha is given"))?,
    )?;
    let n2 = alpha.norm_sqr() + beta.norm_sqr();
    if (n2 - 1.0).abs() > COEFF_TOLERANCE {
        return Err(usage(
            "alpha/beta",
            format!("|alpha|^2 + |beta|^2 = {n2}, must be 1 within {COEFF_TOLERANCE:e}"),
        ));
    }
    SourceCoefficients::normalized(alpha, beta).map_err(|e| usage("alpha/beta", e))
}

fn eta(value: Option<f64>) -> Result<PcEfficiency<f64>, CliError> {
    PcEfficiency::new(value.unwrap_or(1.0)).map_err(|e| usage("eta", e))
}

fn format_for(explicit: Option<String>, out: Option<&Path>) -> Result<OutputFormat, CliError> {
    match explicit.as_deref().map(str::trim) {
        Some("csv") => Ok(OutputFormat::Csv),
        Some("json") => Ok(OutputFormat::Json),
        Some(other) => Err(usage(
            "format",
            format!("unknown format {other:?}; expected csv or json"),
        )),
        None => Ok(match out.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some("json") => OutputFormat::Json,
            _ => OutputFormat::Csv,
        }),
    }
}

fn load_config(path: &Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("`config`: cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("`config` {}: {e}", path.display())))
}

struct Merged {
    alpha: Option<String>,
    beta: Option<String>,
    eta: Option<f64>,
    out: Option<PathBuf>,
    format: Option<String>,
    seed: Option<u64>,
}

fn merge_common(common: CommonArgs, file: &mut ConfigFile) -> Merged {
    Merged {
        alpha: common.alpha.or_else(|| file.alpha.take().map(Scalar::text)),
        beta: common.beta.or_else(|| file.beta.take().map(Scalar::text)),
        eta: common.eta.or(file.eta),
        out: common.out.or_else(|| file.out.take()),
        format: common.format.or_else(|| file.format.take()),
        seed: common.seed.or(file.seed),
    }
}

fn file_for(common: &CommonArgs) -> Result<ConfigFile, CliError> {
    match &common.config {
        Some(path) => load_config(path),
        None => Ok(ConfigFile::default()),
    }
}

/// Parses a full argument vector (program name first).
pub fn parse_config<I, S>(args: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => CliError::Help(e.to_string()),
        _ => CliError::Usage(e.to_string()),
    })?;

    let (command, merged) = match cli.command {
        CommandArgs::Run(args) => {
            let mut file = file_for(&args.common)?;
            let protocol = args.protocol.or_else(|| file.protocol.take());
            let theta = args.theta.or_else(|| file.theta.take().map(ScalarList::text));
            let n = args.n.or(file.n);
            let merged = merge_common(args.common, &mut file);

            if let Some(n) = n.filter(|&n| n < 2) {
                return Err(usage("n", format!("need at least 2 parties, got {n}")));
            }
            let variant = parse_protocol(&protocol.ok_or_else(|| usage("protocol", "required for run"))?)?;
            let mut thetas = parse_angles("theta", &theta.ok_or_else(|| usage("theta", "required for run"))?)?;
            let n = n.unwrap_or(thetas.len());
            if n < 2 {
                return Err(usage("n", format!("need at least 2 parties, got {n}")));
            }
            if thetas.len() == 1 {
                thetas = vec![thetas[0]; n];
            }
            if thetas.len() != n {
                return Err(usage("theta", format!("{} angles for {n} parties", thetas.len())));
            }
            let angles = thetas
                .into_iter()
                .map(|t| RotationAngle::new(t).map_err(|e| usage("theta", e)))
                .collect::<Result<Vec<_>, _>>()?;
            let spec = ProtocolSpec::new(
                variant,
                coefficients(merged.alpha.clone(), merged.beta.clone())?,
                angles,
                eta(merged.eta)?,
            )
            .map_err(|e| usage("n", e))?;
            (Command::Run(spec), merged)
        }
        CommandArgs::Sweep(args) => {
            let mut file = file_for(&args.common)?;
            let grid = args.grid.or_else(|| file.grid.take());
            let variants = args.variants.or_else(|| file.variants.take().map(ScalarList::text));
            let merged = merge_common(args.common, &mut file);

            let (min, max, steps) = match grid {
                Some(g) => parse_grid(&g)?,
                None => (0.0, PI, 101),
            };
            let variants = match variants {
                Some(v) => v
                    .split(',')
                    .map(parse_protocol)
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| match e {
                        CliError::Usage(m) => CliError::Usage(m.replacen("`protocol`", "`variants`", 1)),
                        other => other,
                    })?,
                None => Variant::ALL.to_vec(),
            };
            let coeffs = coefficients(merged.alpha.clone(), merged.beta.clone())?;
            let grid = SweepGrid::new(min, max, steps, coeffs, eta(merged.eta)?).map_err(|e| usage("grid", e))?;
            (Command::Sweep { grid, variants }, merged)
        }
        CommandArgs::Verify(args) => {
            let mut file = file_for(&args.common)?;
            let trials = args.trials.or(file.trials).unwrap_or(DEFAULT_TRIALS);
            let merged = merge_common(args.common, &mut file);
            if trials == 0 {
                return Err(usage("trials", "must be at least 1"));
            }
            (
                Command::Verify {
                    trials,
                    corrupt_sigma_z: args.corrupt_sigma_z,
                },
                merged,
            )
        }
    };

    let output_format = format_for(merged.format, merged.out.as_deref())?;
    Ok(RunConfig {
        command,
        output_path: merged.out,
        output_format,
        seed: merged.seed.unwrap_or(0),
    })
}
