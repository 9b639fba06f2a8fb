use std::time::Duration;

use serde::Serialize;

/// One named verification with its worst residual.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Check {
    /// Passes iff `residual <= tol`.
    pub fn within(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            pass: residual <= tol,
            residual,
            witness: None,
        }
    }

    pub fn new(name: impl Into<String>, pass: bool, residual: f64) -> Self {
        Self {
            name: name.into(),
            pass,
            residual,
            witness: None,
        }
    }

    pub fn with_witness(mut self, witness: impl Into<String>) -> Self {
        self.witness = Some(witness.into());
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub scenario: String,
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub elapsed: Option<Duration>,
}

impl VerificationReport {
    pub fn new(scenario: impl Into<String>) -> Self {
        Self {
            scenario: scenario.into(),
            checks: Vec::new(),
            elapsed: None,
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Running maximum that remembers which item produced it.
#[derive(Clone, Debug, Default)]
pub(crate) struct Worst {
    pub residual: f64,
    pub witness: Option<String>,
}

impl Worst {
    pub fn record(&mut self, residual: f64, witness: impl FnOnce() -> String) {
        if self.witness.is_none() || residual > self.residual {
            self.residual = self.residual.max(residual);
            self.witness = Some(witness());
        }
    }

    pub fn into_check(self, name: &str, tol: f64) -> Check {
        let check = Check::within(name, self.residual, tol);
        match self.witness {
            Some(w) if self.residual > 0.0 => check.with_witness(w),
            _ => check,
        }
    }
}
