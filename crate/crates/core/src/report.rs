//! Named residual checks with tolerances; the common output of every
//! verification operation.

use serde::Serialize;

/// One named residual check.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// A list of checks; `overall` is the conjunction of the per-check verdicts.
#[derive(Debug, Clone, Default, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    pub overall: bool,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self {
            checks: Vec::new(),
            overall: true,
        }
    }

    /// Records `residual` against `tolerance` under `name`.
    pub fn check(&mut self, name: impl Into<String>, residual: f64, tolerance: f64) {
        let pass = residual.is_finite() && residual < tolerance;
        self.overall &= pass;
        self.checks.push(Check {
            name: name.into(),
            residual,
            tolerance,
            pass,
        });
    }

    /// Records a check that holds by convention (e.g. an empty join); the
    /// residual is zero by definition.
    pub fn vacuous(&mut self, name: impl Into<String>, tolerance: f64) {
        self.check(name, 0.0, tolerance);
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.overall &= other.overall;
        self.checks.extend(other.checks);
    }

    pub fn worst(&self) -> Option<&Check> {
        self.checks
            .iter()
            .max_by(|a, b| {
                let ra = a.residual / a.tolerance;
                let rb = b.residual / b.tolerance;
                ra.partial_cmp(&rb).unwrap_or(std::cmp::Ordering::Equal)
            })
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}
