//! Verification reports: ordered lists of named pass/fail checks.

use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

use crate::error::Result;
use crate::opecore::{format_expr, Presentation};
use crate::scalars::Scalar;
use crate::Expr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// One check. A failure carries a witness: the formatted nonzero
/// difference, or the error that stopped the computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub id: String,
    pub status: Status,
    pub witness: Option<String>,
    pub millis: u64,
}

impl CheckResult {
    /// Runs `f`, which returns `None` on success and a witness otherwise.
    pub fn run(id: impl Into<String>, f: impl FnOnce() -> Result<Option<String>>) -> Self {
        let start = Instant::now();
        let outcome = f();
        let millis = start.elapsed().as_millis() as u64;
        let (status, witness) = match outcome {
            Ok(None) => (Status::Pass, None),
            Ok(Some(w)) => (Status::Fail, Some(w)),
            Err(e) => (Status::Fail, Some(format!("error: {e}"))),
        };
        CheckResult { id: id.into(), status, witness, millis }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// `None` if `got = want`, else the formatted difference.
pub fn difference(pres: &Presentation<Scalar>, got: &Expr, want: &Expr) -> Option<String> {
    let diff = got.sub(want);
    (!diff.is_zero()).then(|| format_expr(pres, &diff))
}

/// `None` if `e = 0`, else `e` formatted.
pub fn nonzero(pres: &Presentation<Scalar>, e: &Expr) -> Option<String> {
    (!e.is_zero()).then(|| format_expr(pres, e))
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerificationReport {
    pub campaign: String,
    pub checks: Vec<CheckResult>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Serialize)]
struct CheckRow<'a> {
    id: &'a str,
    status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    millis: Option<u64>,
}

#[derive(Serialize)]
struct ReportFile<'a> {
    campaign: &'a str,
    config: &'a serde_json::Value,
    checks: Vec<CheckRow<'a>>,
    summary: Summary,
}

impl VerificationReport {
    pub fn new(campaign: impl Into<String>) -> Self {
        VerificationReport { campaign: campaign.into(), checks: Vec::new() }
    }

    pub fn push(&mut self, check: CheckResult) {
        self.checks.push(check);
    }

    pub fn check(&mut self, id: impl Into<String>, f: impl FnOnce() -> Result<Option<String>>) {
        self.push(CheckResult::run(id, f));
    }

    /// Appends the checks of `other`, keeping their order.
    pub fn extend(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn summary(&self) -> Summary {
        let passed = self.checks.iter().filter(|c| c.passed()).count();
        Summary { total: self.checks.len(), passed, failed: self.checks.len() - passed }
    }

    /// JSON report. Timings are included only on request so that equal
    /// configurations give byte-identical output.
    pub fn to_json(&self, config: &serde_json::Value, timings: bool) -> serde_json::Value {
        let file = ReportFile {
            campaign: &self.campaign,
            config,
            checks: self
                .checks
                .iter()
                .map(|c| CheckRow {
                    id: &c.id,
                    status: c.status,
                    witness: c.witness.as_deref(),
                    millis: timings.then_some(c.millis),
                })
                .collect(),
            summary: self.summary(),
        };
        serde_json::to_value(file).expect("report serializes")
    }

    /// Plain-text rendering of the same data.
    pub fn to_text(&self, timings: bool) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.passed() { "PASS" } else { "FAIL" };
            let _ = write!(out, "{status} {}", c.id);
            if timings {
                let _ = write!(out, " ({} ms)", c.millis);
            }
            if let Some(w) = &c.witness {
                let _ = write!(out, "\n    witness: {w}");
            }
            out.push('\n');
        }
        let s = self.summary();
        let _ = writeln!(out, "{}: {} checks, {} passed, {} failed", self.campaign, s.total, s.passed, s.failed);
        out
    }
}
