//! Verification records and verdict rules.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::Result;
use crate::quadrature::NormValue;

/// Absolute slack threshold for inequalities.
pub const INEQUALITY_TOLERANCE: f64 = 1e-9;
/// Multiplier on the summed quadrature error estimates for identities.
pub const IDENTITY_ERROR_FACTOR: f64 = 100.0;
/// Floor for identity tolerances, so exact cancellations of error-free terms
/// still leave room for rounding.
pub const IDENTITY_TOLERANCE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    IdentityPass,
    InequalityPass,
    Fail,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        !matches!(self, Verdict::Fail)
    }
}

/// How a record is judged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecordKind {
    Identity,
    Inequality,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadDiagnostics {
    pub total_error_estimate: f64,
    pub max_error_estimate: f64,
    pub panels: usize,
    pub converged: bool,
}

impl Default for QuadDiagnostics {
    fn default() -> Self {
        Self {
            total_error_estimate: 0.0,
            max_error_estimate: 0.0,
            panels: 0,
            converged: true,
        }
    }
}

impl QuadDiagnostics {
    pub fn of(parts: &[&NormValue]) -> Self {
        let mut d = Self::default();
        for p in parts {
            d.total_error_estimate += p.error_estimate;
            d.max_error_estimate = d.max_error_estimate.max(p.error_estimate);
            d.panels += p.panels;
            d.converged &= p.converged;
        }
        d
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub statement: String,
    pub setting: String,
    pub function: String,
    pub params: BTreeMap<String, f64>,
    pub kind: RecordKind,
    pub lhs: f64,
    pub rhs: f64,
    pub remainder: Option<f64>,
    /// Identities: `|lhs − rhs| / scale`. Inequalities: `(rhs − lhs) / scale`.
    pub residual: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    /// Power of the quasi-sphere measure cancelled from both sides.
    pub sigma_power: f64,
    pub quad_diagnostics: QuadDiagnostics,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl VerificationRecord {
    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }

    /// `rhs − lhs`.
    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }

    pub fn with_param(mut self, k: &str, v: f64) -> Self {
        self.params.insert(k.to_string(), v);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Common fields of a record under construction.
#[derive(Debug, Clone)]
pub struct RecordHead {
    pub statement: String,
    pub setting: String,
    pub function: String,
    pub params: BTreeMap<String, f64>,
}

impl RecordHead {
    pub fn new(statement: &str, setting: impl ToString, function: &str, params: &[(&str, f64)]) -> Self {
        Self {
            statement: statement.to_string(),
            setting: setting.to_string(),
            function: function.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    /// Equality `lhs = rhs`; `parts` are the independently integrated terms
    /// whose magnitudes set the scale and whose error estimates set the tolerance.
    pub fn identity(
        self,
        lhs: &NormValue,
        rhs: &NormValue,
        remainder: Option<&NormValue>,
        parts: &[&NormValue],
    ) -> Result<VerificationRecord> {
        lhs.check_same_sigma(rhs)?;
        let scale = parts
            .iter()
            .map(|p| p.value.abs())
            .chain([lhs.value.abs(), rhs.value.abs()])
            .fold(0.0, f64::max);
        let diag = QuadDiagnostics::of(parts);
        let (residual, tolerance) = if scale == 0.0 {
            (0.0, IDENTITY_TOLERANCE_FLOOR)
        } else {
            (
                (lhs.value - rhs.value).abs() / scale,
                (IDENTITY_ERROR_FACTOR * diag.total_error_estimate / scale).max(IDENTITY_TOLERANCE_FLOOR),
            )
        };
        let rem_ok = remainder.is_none_or(|r| r.value >= -INEQUALITY_TOLERANCE.max(tolerance * scale));
        let ok = diag.converged && residual <= tolerance && rem_ok && residual.is_finite();
        Ok(VerificationRecord {
            statement: self.statement,
            setting: self.setting,
            function: self.function,
            params: self.params,
            kind: RecordKind::Identity,
            lhs: lhs.value,
            rhs: rhs.value,
            remainder: remainder.map(|r| r.value),
            residual,
            tolerance,
            verdict: if ok { Verdict::IdentityPass } else { Verdict::Fail },
            sigma_power: lhs.sigma_power,
            quad_diagnostics: diag,
            note: None,
        })
    }

    /// Inequality `lhs ≤ rhs`.
    pub fn inequality(
        self,
        lhs: &NormValue,
        rhs: &NormValue,
        remainder: Option<&NormValue>,
        parts: &[&NormValue],
    ) -> Result<VerificationRecord> {
        lhs.check_same_sigma(rhs)?;
        let diag = QuadDiagnostics::of(parts);
        let slack = rhs.value - lhs.value;
        let scale = lhs.value.abs().max(rhs.value.abs());
        let residual = if scale == 0.0 { 0.0 } else { slack / scale };
        let rem_ok = remainder.is_none_or(|r| r.value >= -INEQUALITY_TOLERANCE);
        let ok = diag.converged && slack >= -INEQUALITY_TOLERANCE && rem_ok && slack.is_finite();
        Ok(VerificationRecord {
            statement: self.statement,
            setting: self.setting,
            function: self.function,
            params: self.params,
            kind: RecordKind::Inequality,
            lhs: lhs.value,
            rhs: rhs.value,
            remainder: remainder.map(|r| r.value),
            residual,
            tolerance: INEQUALITY_TOLERANCE,
            verdict: if ok { Verdict::InequalityPass } else { Verdict::Fail },
            sigma_power: lhs.sigma_power,
            quad_diagnostics: diag,
            note: None,
        })
    }
}
