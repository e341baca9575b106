use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{CheckKind, Expectation, Sampling};
use crate::soliton::SolitonClass;

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    /// A check refers to something the manifest does not define, or to
    /// something of the wrong kind.
    Resolution,
    /// Evaluation failed at a sample point (domain error, degenerate metric).
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckError {
    pub kind: ErrorKind,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RouteStats {
    pub max: f64,
    pub rms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub id: String,
    pub kind: CheckKind,
    /// Field or chart the check ran on.
    pub subject: Option<String>,
    pub sampling: Option<Sampling>,
    pub points_evaluated: usize,
    pub max_residual: Option<f64>,
    pub rms_residual: Option<f64>,
    pub worst_point: Option<Vec<f64>>,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub expect: Expectation,
    pub expectation_met: bool,
    pub classification: Option<SolitonClass>,
    pub route_discrepancy: Option<RouteStats>,
    pub diagnostics: BTreeMap<String, f64>,
    pub error: Option<CheckError>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub checks: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
    pub expectations_missed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub version: u32,
    pub checks: Vec<CheckReport>,
    pub summary: Summary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

impl RunReport {
    pub fn new(checks: Vec<CheckReport>) -> Self {
        let count = |v: Verdict| checks.iter().filter(|c| c.verdict == v).count();
        let summary = Summary {
            checks: checks.len(),
            passed: count(Verdict::Pass),
            failed: count(Verdict::Fail),
            errors: count(Verdict::Error),
            expectations_missed: checks.iter().filter(|c| !c.expectation_met).count(),
        };
        RunReport {
            version: REPORT_VERSION,
            checks,
            summary,
            wall_ms: None,
        }
    }

    pub fn all_met(&self) -> bool {
        self.summary.expectations_missed == 0
    }

    /// 0 when every expectation is met, 3 if any point evaluation failed,
    /// 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        let numeric = self.checks.iter().any(|c| {
            matches!(
                &c.error,
                Some(CheckError {
                    kind: ErrorKind::Numeric,
                    ..
                })
            )
        });
        if numeric {
            3
        } else if self.all_met() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }

    /// Human-readable rendering. Numbers are printed exactly as in the JSON.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let mark = if c.expectation_met { "ok  " } else { "MISS" };
            let verdict = match c.verdict {
                Verdict::Pass => "pass",
                Verdict::Fail => "fail",
                Verdict::Error => "error",
            };
            let subject = c.subject.as_deref().unwrap_or("-");
            let _ = write!(out, "{mark} {verdict:<5} {} [{} on {subject}]", c.id, c.kind);
            if c.expect == Expectation::Fail {
                out.push_str(" (expected to fail)");
            }
            out.push('\n');
            if let (Some(max), Some(rms)) = (c.max_residual, c.rms_residual) {
                let _ = writeln!(
                    out,
                    "       max={} rms={} tol={} points={}",
                    num(max),
                    num(rms),
                    num(c.tolerance),
                    c.points_evaluated
                );
            }
            if let Some(p) = &c.worst_point {
                let coords: Vec<String> = p.iter().map(|x| num(*x)).collect();
                let _ = writeln!(out, "       worst_point=({})", coords.join(", "));
            }
            if let Some(r) = &c.route_discrepancy {
                let _ = writeln!(out, "       route_discrepancy max={} rms={}", num(r.max), num(r.rms));
            }
            if let Some(class) = c.classification {
                let _ = writeln!(out, "       classification={class}");
            }
            for (k, v) in &c.diagnostics {
                let _ = writeln!(out, "       {k}={}", num(*v));
            }
            if let Some(e) = &c.error {
                let kind = match e.kind {
                    ErrorKind::Resolution => "resolution",
                    ErrorKind::Numeric => "numeric",
                };
                let _ = writeln!(out, "       {kind} error: {}", e.message);
            }
            if let Some(ms) = c.wall_ms {
                let _ = writeln!(out, "       wall_ms={}", num(ms));
            }
        }
        let s = &self.summary;
        let _ = writeln!(
            out,
            "{} checks: {} pass, {} fail, {} error; {} expectation(s) missed",
            s.checks, s.passed, s.failed, s.errors, s.expectations_missed
        );
        out
    }
}

/// Same shortest round-trip form serde_json uses.
fn num(x: f64) -> String {
    serde_json::to_string(&x).unwrap_or_else(|_| x.to_string())
}
