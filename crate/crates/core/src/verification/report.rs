use std::collections::BTreeMap;

use serde::Serialize;

use crate::expr::{PhasePoint, ZeroVerdict};

/// One pass/fail line with its worst residual and, on failure, a witness.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Worst residual seen (0 for symbolic passes).
    pub value: f64,
    pub tolerance: f64,
    pub points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<BTreeMap<String, f64>>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

pub(crate) fn point_map(pt: &PhasePoint) -> BTreeMap<String, f64> {
    pt.iter().map(|(s, v)| (s.to_string(), v)).collect()
}

impl CheckResult {
    pub fn new(name: &str, value: f64, tolerance: f64, points: usize) -> Self {
        CheckResult {
            name: name.to_string(),
            passed: value.is_finite() && value < tolerance,
            value,
            tolerance,
            points,
            witness: None,
            detail: String::new(),
        }
    }

    /// Explicit outcome, for checks that are not a residual bound.
    pub fn outcome(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        CheckResult {
            name: name.to_string(),
            passed,
            value: if passed { 0.0 } else { 1.0 },
            tolerance: 0.5,
            points: 0,
            witness: None,
            detail: detail.into(),
        }
    }

    pub fn from_verdict(name: &str, verdict: &ZeroVerdict, tolerance: f64) -> Self {
        match verdict {
            ZeroVerdict::Zero => CheckResult {
                detail: "symbolic".into(),
                ..CheckResult::new(name, 0.0, tolerance, 0)
            },
            ZeroVerdict::ProbablyZero { points, max_residual } => CheckResult {
                detail: "numeric".into(),
                ..CheckResult::new(name, *max_residual, tolerance, *points)
            },
            ZeroVerdict::NonZero { witness, value } => CheckResult {
                passed: false,
                witness: Some(point_map(witness)),
                detail: "nonzero".into(),
                ..CheckResult::new(name, value.abs(), tolerance, 1)
            },
            ZeroVerdict::Undecided => CheckResult {
                passed: false,
                detail: "no admissible sample point".into(),
                ..CheckResult::new(name, f64::NAN, tolerance, 0)
            },
        }
    }

    /// Attach a measured value without changing the outcome.
    pub fn with_value(mut self, value: f64) -> Self {
        self.value = value;
        self
    }

    pub fn with_witness(mut self, pt: &PhasePoint) -> Self {
        self.witness = Some(point_map(pt));
        self
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub subject: String,
    pub passed: bool,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sub_reports: Vec<VerificationReport>,
}

impl VerificationReport {
    pub fn new(subject: impl Into<String>, seed: u64) -> Self {
        VerificationReport {
            subject: subject.into(),
            passed: true,
            seed,
            checks: Vec::new(),
            sub_reports: Vec::new(),
        }
    }

    pub fn push(&mut self, check: CheckResult) {
        self.passed &= check.passed;
        self.checks.push(check);
    }

    pub fn push_report(&mut self, sub: VerificationReport) {
        self.passed &= sub.passed;
        self.sub_reports.push(sub);
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Names of failing checks, including those of sub-reports.
    pub fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> = self.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
        for s in &self.sub_reports {
            out.extend(s.failures().into_iter().map(|f| format!("{}/{f}", s.subject)));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
