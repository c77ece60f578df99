//! Command-line front end for the `qtag-core` simulator.
//!
//! Exit codes: 0 on success, 1 on usage or I/O errors, 2 when `verify` finds a
//! discrepancy.

pub mod config;
pub mod error;
pub mod exec;
pub mod output;

pub use config::{parse_config, Command, OutputFormat, RunConfig};
pub use error::CliError;
pub use exec::{execute, Report};

/// Parses, executes and prints; returns the process exit code.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let result = parse_config(args).and_then(|cfg| execute(&cfg));
    match result {
        Ok(report) => {
            println!("{}", report.summary);
            for line in &report.diagnostics {
                eprintln!("{line}");
            }
            report.exit_code()
        }
        Err(CliError::Help(text)) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
