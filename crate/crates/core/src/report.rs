//! Machine-readable check reports.

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// `{"check": name, "status": "pass"|"fail", "samples": n, "witness": ...}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub status: Status,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl CheckReport {
    pub fn pass(check: impl Into<String>, samples: usize) -> Self {
        CheckReport {
            check: check.into(),
            status: Status::Pass,
            samples,
            witness: None,
        }
    }

    pub fn fail(check: impl Into<String>, samples: usize, witness: Value) -> Self {
        CheckReport {
            check: check.into(),
            status: Status::Fail,
            samples,
            witness: Some(witness),
        }
    }

    /// Pass with `samples`, or fail at the first witness.
    pub fn from_result(check: impl Into<String>, samples: usize, r: Result<(), Value>) -> Self {
        match r {
            Ok(()) => CheckReport::pass(check, samples),
            Err(w) => CheckReport::fail(check, samples, w),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Prefixes the check name, e.g. with the context it ran on.
    pub fn scoped(mut self, scope: &str) -> Self {
        self.check = format!("{scope}/{}", self.check);
        self
    }

    /// Attaches an informational value to a passing check.
    pub fn with_detail(mut self, detail: Value) -> Self {
        if self.witness.is_none() {
            self.witness = Some(detail);
        }
        self
    }
}

pub fn all_passed(reports: &[CheckReport]) -> bool {
    reports.iter().all(CheckReport::passed)
}

pub fn failures(reports: &[CheckReport]) -> impl Iterator<Item = &CheckReport> {
    reports.iter().filter(|r| !r.passed())
}

/// Runs `check` over `samples` iterations, stopping at the first witness.
pub fn sampled(
    name: &str,
    samples: usize,
    mut check: impl FnMut(usize) -> Result<(), Value>,
) -> CheckReport {
    let r = (0..samples).try_for_each(&mut check);
    CheckReport::from_result(name, samples, r)
}
