use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use super::checks::{Outcome, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    ReportOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointResidual {
    /// Sample index; absent for checks over the whole domain.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub id: String,
    pub status: Status,
    pub tolerance: f64,
    pub max: f64,
    pub mean: f64,
    pub within_tolerance: bool,
    pub verdict: Verdict,
    pub residuals: Vec<PointResidual>,
    #[serde(skip_serializing_if = "is_zero")]
    pub skipped: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
}

fn is_zero(n: &usize) -> bool {
    *n == 0
}

impl CheckRecord {
    /// `within_tolerance` requires at least one evaluated residual, all finite
    /// and ≤ `tolerance`.
    pub fn new(id: &str, status: Status, tolerance: f64, outcome: Outcome) -> Self {
        let mut residuals: Vec<PointResidual> = outcome
            .residuals
            .into_iter()
            .map(|(index, residual)| PointResidual { index, residual })
            .collect();
        residuals.sort_by_key(|r| r.index);
        let max = residuals.iter().fold(0.0f64, |m, r| {
            if r.residual.is_nan() || m.is_nan() {
                f64::NAN
            } else {
                m.max(r.residual)
            }
        });
        let mean = if residuals.is_empty() {
            0.0
        } else {
            residuals.iter().map(|r| r.residual).sum::<f64>() / residuals.len() as f64
        };
        let within = !residuals.is_empty() && max.is_finite() && max <= tolerance;
        let verdict = match (status, within) {
            (Status::ReportOnly, _) => Verdict::ReportOnly,
            (Status::Asserted, true) => Verdict::Pass,
            (Status::Asserted, false) => Verdict::Fail,
        };
        CheckRecord {
            id: id.to_string(),
            status,
            tolerance,
            max,
            mean,
            within_tolerance: within,
            verdict,
            residuals,
            skipped: outcome.skipped,
            detail: outcome.detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Environment {
    pub seed: u64,
    pub jet_order: usize,
    pub points: usize,
    pub sampler: String,
    pub strict: bool,
    pub tool_version: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub report_only: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub scenario: String,
    pub environment: Environment,
    /// Sorted by check id.
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

impl CheckReport {
    pub fn new(scenario: String, environment: Environment, mut checks: Vec<CheckRecord>) -> Self {
        checks.sort_by(|a, b| a.id.cmp(&b.id));
        let mut summary = Summary::default();
        for c in &checks {
            match c.verdict {
                Verdict::Pass => summary.pass += 1,
                Verdict::Fail => summary.fail += 1,
                Verdict::ReportOnly => summary.report_only += 1,
            }
        }
        CheckReport {
            scenario,
            environment,
            checks,
            summary,
        }
    }

    /// Whether any asserted check failed.
    pub fn failed(&self) -> bool {
        self.summary.fail > 0
    }

    pub fn check(&self, id: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One row per check and sample point.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("check,status,point,residual,tolerance,verdict\n");
        for c in &self.checks {
            let status = match c.status {
                Status::Asserted => "asserted",
                Status::ReportOnly => "report-only",
            };
            let verdict = match c.verdict {
                Verdict::Pass => "pass",
                Verdict::Fail => "fail",
                Verdict::ReportOnly => "report-only",
            };
            for r in &c.residuals {
                let point = r.index.map(|i| i.to_string()).unwrap_or_default();
                let _ = writeln!(
                    s,
                    "{},{status},{point},{:e},{:e},{verdict}",
                    c.id, r.residual, c.tolerance
                );
            }
        }
        s
    }
}
