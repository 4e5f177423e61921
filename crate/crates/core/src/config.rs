//! Numerical tolerances shared by every module.
//!
//! All thresholds live here so that reports and tests agree on the same
//! numbers. [`Tolerances::scaled`] multiplies the acceptance thresholds (not
//! the structural constants such as the positivity floor) by a common factor.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Entrywise Hermiticity check on construction.
    pub hermitian: f64,
    /// Relative gap below which two eigenvalues are treated as coincident.
    pub cluster_rel: f64,
    /// Relative gap below which a divided difference is evaluated through
    /// the derivative at the midpoint instead of the difference quotient.
    pub near_degenerate_rel: f64,
    /// Eigenvalue floor for faithful states and invertible positive operators.
    pub positivity_floor: f64,
    /// Allowed deviation of a state's trace from 1.
    pub trace: f64,
    /// Allowed trace of a state-space tangent vector.
    pub traceless: f64,
    /// Reconstruction and orthogonality of eigendecompositions.
    pub eig: f64,
    /// Analytic-vs-analytic identities (relative).
    pub analytic: f64,
    /// Analytic-vs-finite-difference identities (relative).
    pub numeric: f64,
    /// Fundamental fields and expectation transport against a single central
    /// difference of the flow.
    pub flow: f64,
    /// Vector-field brackets under nested finite differencing.
    pub bracket: f64,
    /// Structural identities expected to hold to rounding (`K(rho) = rho^2`,
    /// action axioms, unitary invariance).
    pub structural: f64,
    /// Identities that are exact up to a handful of floating point operations.
    pub exact: f64,
    /// Margin below which a contraction or monotonicity check counts as violated.
    pub violation: f64,
    /// Central finite-difference step for fundamental fields.
    pub fd_step: f64,
    /// Outer finite-difference step for vector-field brackets.
    pub bracket_step: f64,
    /// Smallest singular value accepted for a general linear group element.
    pub invertibility: f64,
    /// Half-width of the series branch of the Petz functions around `x = 1`.
    pub series_branch: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-12,
            cluster_rel: 1e-10,
            near_degenerate_rel: 1e-5,
            positivity_floor: 1e-12,
            trace: 1e-12,
            traceless: 1e-12,
            eig: 1e-10,
            analytic: 1e-9,
            numeric: 1e-6,
            flow: 1e-7,
            bracket: 1e-5,
            structural: 1e-10,
            exact: 1e-12,
            violation: 1e-8,
            fd_step: 1e-5,
            bracket_step: 1e-4,
            invertibility: 1e-10,
            series_branch: 1e-6,
        }
    }
}

impl Tolerances {
    /// Scales every acceptance threshold by `factor`.
    pub fn scaled(mut self, factor: f64) -> Self {
        self.analytic *= factor;
        self.numeric *= factor;
        self.flow *= factor;
        self.bracket *= factor;
        self.structural *= factor;
        self.exact *= factor;
        self.eig *= factor;
        self.violation *= factor;
        self
    }
}

/// Relative residual `|x - y| / max(|y|, tiny)` for already computed norms.
pub fn relative(diff: f64, reference: f64) -> f64 {
    diff / reference.abs().max(1e-300)
}

/// Residual relative to `max(1, |reference|)`: absolute for small quantities,
/// relative for large ones.
pub fn mixed(diff: f64, reference: f64) -> f64 {
    diff / reference.abs().max(1.0)
}
