//! Scenario files, batch execution and on-disk output.
//!
//! A scenario is a TOML document (see [`ScenarioConfig`]). [`run_scenario`]
//! splits it into independent jobs, runs them on a thread pool, writes each
//! job's CSV series into its own directory and finishes with an atomically
//! written `manifest.json` that lists every file and every audit.

mod config;
mod output;
mod run;

pub use config::{
    preset, validate_config, ChartConfig, GeneratorName, GeodesicConfig, GeodesicPreset, RandomBatch, ScanConfig,
    ScenarioConfig, ScenarioKind, TrappedConfig, WaveConfig,
};
pub use output::{emit_series, trajectory_ledger, write_atomic};
pub use run::{
    resolve_out_dir, run_scenario, AuditEntry, JobRecord, JobStatus, RunManifest, RunOptions, SeriesRecord,
    MANIFEST_FILE, OUT_ENV,
};

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid value for `{key}`: {constraint}")]
    Constraint { key: String, constraint: String },
    #[error("I/O error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("ledger `{0}` has no rows")]
    EmptyLedger(String),
    #[error("{} audit(s) failed; see {manifest}", failures.len())]
    Audit { manifest: PathBuf, failures: Vec<String> },
}

impl HarnessError {
    pub(crate) fn constraint(key: &str, constraint: impl Into<String>) -> Self {
        HarnessError::Constraint { key: key.into(), constraint: constraint.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.into(), source }
    }

    /// Process exit status: 2 for configuration, 3 for audits, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Parse { .. } | HarnessError::Constraint { .. } => 2,
            HarnessError::Audit { .. } => 3,
            HarnessError::Io { .. } | HarnessError::EmptyLedger(_) => 4,
        }
    }
}
