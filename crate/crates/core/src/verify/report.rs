//! Structured outcome of one numerical check.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// The check could not certify its own accuracy (e.g. truncation budget).
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub label: String,
    pub value: f64,
    pub tolerance: f64,
}

impl Residual {
    pub fn new(label: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            label: label.into(),
            value,
            tolerance,
        }
    }

    pub fn within(&self) -> bool {
        self.value.abs() <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub params: Map<String, Value>,
    pub residuals: Vec<Residual>,
    pub max_residual: f64,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl VerificationReport {
    /// Pass iff every residual is within its tolerance, unless `inconclusive`.
    pub fn new(check: impl Into<String>, params: Map<String, Value>, residuals: Vec<Residual>, notes: Vec<String>) -> Self {
        let max_residual = residuals.iter().map(|r| r.value.abs()).fold(0.0, f64::max);
        let verdict = if residuals.iter().all(Residual::within) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self {
            check: check.into(),
            params,
            residuals,
            max_residual,
            verdict,
            notes,
        }
    }

    pub fn inconclusive(mut self, reason: impl Into<String>) -> Self {
        self.verdict = Verdict::Inconclusive;
        self.notes.push(reason.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// One JSON object, no trailing newline.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

/// Builds a parameter map from `(name, value)` pairs.
pub fn params<const K: usize>(entries: [(&str, Value); K]) -> Map<String, Value> {
    entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// Overall verdict of a set of reports: any failure fails, else any
/// inconclusive check makes the whole inconclusive.
pub fn overall(reports: &[VerificationReport]) -> Verdict {
    if reports.iter().any(|r| r.verdict == Verdict::Fail) {
        Verdict::Fail
    } else if reports.iter().any(|r| r.verdict == Verdict::Inconclusive) {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    }
}
