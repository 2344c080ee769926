//! Config-driven runner for the concealed-motion solvers: parses scenario
//! files, runs the label fluid beside the wavefunction reference and writes
//! CSV time series plus plain-text reports.

// `!(x > 0)` is deliberate: NaN must fail the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod converge;
pub mod routh_demo;
pub mod run;

use std::fmt::Display;
use std::path::Path;

use thiserror::Error;

pub use config::{parse_config, ConfigError, ScenarioConfig, ScenarioKind};
pub use converge::{converge, ConvergenceTable};
pub use run::{simulate, Metrics, Resolution, RunReport};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot read {path}: {reason}")]
    Read { path: String, reason: String },
    #[error("setup failed: {0}")]
    Setup(concealed_core::Error),
    #[error("output error: {0}")]
    Io(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub(crate) fn output(path: &Path, e: impl Display) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    /// 1 for anything wrong with the inputs or the environment, 2 when the
    /// solvers fail part way.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Numerical(_) => 2,
            _ => 1,
        }
    }
}

/// Shortest round-trip text for a CSV cell, switching to exponent form for
/// very small or very large magnitudes.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-4..1e15).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

/// Console output policy.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sink {
    pub quiet: bool,
}

impl Sink {
    pub fn info(&self, msg: &str) {
        if !self.quiet {
            println!("{msg}");
        }
    }

    /// Warnings go to stderr even when quiet.
    pub fn warn(&self, msg: &str) {
        eprintln!("warning: {msg}");
    }
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Read {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    Ok(parse_config(&text)?)
}

fn prepare(out_dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::output(out_dir, e))
}

/// Runs a scenario, writes CSVs and `report.txt`, and turns a failed step
/// into [`CliError::Numerical`] after the partial report is on disk.
pub fn run_to_dir(cfg: &ScenarioConfig, out_dir: &Path, sink: &mut Sink) -> Result<RunReport, CliError> {
    prepare(out_dir)?;
    let report = simulate(cfg, Some(out_dir), sink)?;
    let path = out_dir.join("report.txt");
    std::fs::write(&path, report.render()).map_err(|e| CliError::output(&path, e))?;
    sink.info(&report.render());
    match &report.failure {
        Some(e) => Err(CliError::Numerical(format!("step {}: {e}", report.steps_done + 1))),
        None => Ok(report),
    }
}

pub fn converge_to_dir(cfg: &ScenarioConfig, out_dir: &Path, sink: &mut Sink) -> Result<ConvergenceTable, CliError> {
    prepare(out_dir)?;
    let table = converge(cfg, Some(out_dir), sink)?;
    sink.info(&table.render());
    match table.failed() {
        Some(r) => Err(CliError::Numerical(format!(
            "level {}: {}",
            r.resolution,
            r.failure.as_deref().unwrap_or("")
        ))),
        None => Ok(table),
    }
}
