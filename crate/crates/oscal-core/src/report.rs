//! Uniform pass/fail record for every verified identity.

use serde::{Deserialize, Serialize};

/// Outcome of checking one operator identity at a stated tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// Stable machine-readable identifier, e.g. `susy1d.anticommutator_qp`.
    pub identity_id: String,
    /// Source-equation label exposed through the reporting interface.
    pub paper_eq: String,
    /// Measured residual in the max norm (or fit discrepancy where noted).
    pub residual: f64,
    /// Tolerance the residual was held against.
    pub tolerance: f64,
    /// Whether `residual <= tolerance`.
    pub passed: bool,
    /// Free-form context: fitted coefficients, discrepancies, caveats.
    pub notes: String,
}

impl VerificationReport {
    /// Build a report, deriving `passed` from the residual/tolerance pair.
    pub fn new(identity_id: &str, paper_eq: &str, residual: f64, tolerance: f64) -> Self {
        Self {
            identity_id: identity_id.to_string(),
            paper_eq: paper_eq.to_string(),
            residual,
            tolerance,
            passed: residual.is_finite() && residual <= tolerance,
            notes: String::new(),
        }
    }

    /// Attach a context note (fitted constants, recorded discrepancies, ...).
    pub fn with_note(mut self, note: &str) -> Self {
        self.notes = note.to_string();
        self
    }

    /// One-line human-readable rendering.
    pub fn summary_line(&self) -> String {
        let status = if self.passed { "pass" } else { "FAIL" };
        let mut line = format!(
            "{status}  {id}  residual {res:.3e} (tol {tol:.1e})",
            id = self.identity_id,
            res = self.residual,
            tol = self.tolerance,
        );
        if !self.notes.is_empty() {
            line.push_str("  -- ");
            line.push_str(&self.notes);
        }
        line
    }
}
