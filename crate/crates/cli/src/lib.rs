//! Command-line front end for the fockforce simulator.
//!
//! [`run`] parses arguments and executes one subcommand, returning what
//! should be printed and the process exit code; `main` only forwards it.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod config;
pub mod error;
pub mod family;
pub mod output;
pub mod sample;
pub mod sensitivity;
pub mod state;
pub mod verify;

use std::ffi::OsString;

use clap::Parser;

use args::{Cli, Command, SampleOnly, SweepOnly};
use config::{merge, RunConfig};
use error::{exit, CliResult};

/// Output of one subcommand before it is routed to a sink.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    /// The CSV or JSON document.
    pub body: String,
    /// Human-readable summary.
    pub note: String,
    pub code: i32,
}

impl Report {
    pub fn new(body: String, note: String) -> Self {
        Self { body, note, code: exit::OK }
    }
}

/// What the process prints, and its exit status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Writes the document to `--out` (summary on stdout) or to stdout
/// (summary on stderr).
fn deliver(report: Report, cfg: &RunConfig) -> CliResult<Outcome> {
    Ok(match &cfg.output_path {
        Some(path) => {
            output::write_file(path, &report.body)?;
            Outcome { code: report.code, stdout: report.note, stderr: String::new() }
        }
        None => Outcome { code: report.code, stdout: report.body, stderr: report.note },
    })
}

pub fn execute(cli: Cli) -> CliResult<Outcome> {
    let none = (SweepOnly::default(), SampleOnly::default());
    let (merged, from) = match &cli.command {
        Command::State(a) => (merge(a.common.clone(), none.0, none.1)?, a.from.clone()),
        Command::Sensitivity(c) | Command::Verify(c) => (merge(c.clone(), none.0, none.1)?, None),
        Command::Sweep(a) => (merge(a.common.clone(), a.sweep.clone(), none.1)?, None),
        Command::Sample(a) => (merge(a.common.clone(), none.0, a.sample.clone())?, None),
    };
    let cfg = RunConfig::from_args(&merged.common)?;
    let c = &merged.common;
    let report = match cli.command {
        Command::State(_) => state::run(c, from.as_deref(), &cfg)?,
        Command::Sensitivity(_) => sensitivity::run(c, &cfg)?,
        Command::Sweep(_) => sensitivity::run_sweep(c, &merged.sweep, &cfg)?,
        Command::Sample(_) => sample::run(c, &merged.sample, &cfg)?,
        Command::Verify(_) => verify::run(c, &cfg)?,
    };
    deliver(report, &cfg)
}

/// Parses `args` (program name first) and runs the subcommand.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: exit::INPUT, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: exit::OK, stdout: text, stderr: String::new() }
            };
        }
    };
    execute(cli).unwrap_or_else(|e| Outcome {
        code: e.code,
        stdout: String::new(),
        stderr: format!("error: {}\n", e.message),
    })
}
