//! Suite configuration, execution and reporting.

pub mod config;
pub mod output;
pub mod statements;
pub mod suite;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::verifiers::{SpotCheck, SweepReport, VerificationRecord};

pub use config::{CorpusConfig, ExponentSpec, OutputConfig, SuiteConfig, SweepConfig};
pub use output::{combinatorics_csv, emit_outputs, records_csv};
pub use statements::{lookup, suite_statements, StatementClass, StatementInfo, STATEMENTS, SUITES};
pub use suite::run_suite;

pub const SCHEMA_VERSION: u32 = 1;

/// A Cartesian cross-check of a reduction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub statement: String,
    pub setting: String,
    pub function: String,
    /// `collapse`, `tensor-3d`, `cartesian-2d` or `euclidean-match`.
    pub path: String,
    pub p: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<SpotCheck>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    /// File name of the sweep table next to the report.
    pub csv: String,
    pub report: SweepReport,
}

/// Worst case per statement; residuals are never averaged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatementSummary {
    pub statement: String,
    pub records: usize,
    pub failed: usize,
    pub worst_identity_residual: Option<f64>,
    pub worst_identity_function: Option<String>,
    /// Smallest relative slack among inequality records.
    pub min_inequality_residual: Option<f64>,
    pub min_inequality_function: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub records: usize,
    pub passed: usize,
    pub failed: usize,
    pub checks: usize,
    pub checks_failed: usize,
    pub sweeps: usize,
    pub sweeps_failed: usize,
    pub statements: Vec<StatementSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub tool_version: String,
    pub suite: String,
    pub config_hash: String,
    pub summary: Summary,
    pub records: Vec<VerificationRecord>,
    pub checks: Vec<CheckEntry>,
    pub sweeps: Vec<SweepEntry>,
    pub notes: Vec<String>,
    /// Wall-clock time of the run; the only field that varies between
    /// identical runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

impl Report {
    pub fn empty(suite: &str, config_hash: &str) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            suite: suite.into(),
            config_hash: config_hash.into(),
            summary: Summary {
                records: 0,
                passed: 0,
                failed: 0,
                checks: 0,
                checks_failed: 0,
                sweeps: 0,
                sweeps_failed: 0,
                statements: vec![],
            },
            records: vec![],
            checks: vec![],
            sweeps: vec![],
            notes: vec![],
            timestamp: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.passed())
            && self.checks.iter().all(|c| c.passed)
            && self.sweeps.iter().all(|s| s.report.passed())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("report JSON: {e}")))
    }
}
