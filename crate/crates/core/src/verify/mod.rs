//! Verification suites: each identity becomes a grid of cells over
//! dimension, deformation parameter and Petz function, with seeded trials
//! and a pass/fail verdict per cell.

mod actions;
mod commutators;
mod gradient;
mod kappa_scan;
mod metric;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::monotone::MonotoneFunctionSpec;
use crate::random::{coord_f64, coord_str, derive_seed, Sampler};

pub use actions::suite_action_structure;
pub use commutators::suite_commutators;
pub use gradient::suite_gradient_equals_fundamental;
pub use kappa_scan::suite_kappa_scan;
pub use metric::suite_metric_properties;

/// Cap on the number of violations listed per cell.
pub const MAX_LISTED_VIOLATIONS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub dims: Vec<usize>,
    pub kappas: Vec<f64>,
    pub specs: Vec<MonotoneFunctionSpec>,
    pub trials: usize,
    pub seed: u64,
    /// Factor applied to every acceptance threshold.
    pub tol_scale: f64,
    /// Record wall time in reports (breaks byte-for-byte reproducibility).
    pub timing: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            dims: vec![2, 3, 4],
            kappas: vec![0.25, 0.5, 0.75, 1.0],
            specs: ["bh", "wy", "bkm", "gl:0.3", "gl:0.8"].iter().map(|s| s.parse().expect("valid spec")).collect(),
            trials: 100,
            seed: 0,
            tol_scale: 1.0,
            timing: false,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() || self.dims.iter().any(|&n| n < 2) {
            return Err(Error::InvalidParameter("dims must be non-empty and each at least 2".into()));
        }
        if self.kappas.iter().any(|&k| !(k > 0.0 && k.is_finite())) {
            return Err(Error::InvalidParameter("kappas must be positive".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if !(self.tol_scale > 0.0 && self.tol_scale.is_finite()) {
            return Err(Error::InvalidParameter("tolerance scale must be positive".into()));
        }
        Ok(())
    }

    pub fn tolerances(&self) -> Tolerances {
        Tolerances::default().scaled(self.tol_scale)
    }

    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            dims: self.dims.clone(),
            kappas: self.kappas.clone(),
            specs: self.specs.iter().map(|s| s.to_string()).collect(),
            trials: self.trials,
            seed: self.seed,
            tol_scale: self.tol_scale,
            tolerances: self.tolerances(),
        }
    }
}

/// Serializable copy of a [`SuiteConfig`] embedded in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub dims: Vec<usize>,
    pub kappas: Vec<f64>,
    pub specs: Vec<String>,
    pub trials: usize,
    pub seed: u64,
    pub tol_scale: f64,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub trial: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub trial: usize,
    pub min_eigenvalue: f64,
    pub a: crate::matrix::MatrixJson,
    pub b: crate::matrix::MatrixJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub suite: String,
    pub check: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub spec: Option<String>,
    pub trials: usize,
    pub skipped: usize,
    pub max_abs_residual: f64,
    pub tolerance: f64,
    pub violation_count: usize,
    pub violations: Vec<Violation>,
    pub seed: u64,
    /// Informational cells are reported but never counted as violations.
    pub counted: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<WitnessReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub derivative: Option<crate::monotone::DerivativeAtZero>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl CellReport {
    pub fn passed(&self) -> bool {
        !self.counted || self.violation_count == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub version: String,
    pub suite: String,
    pub config: ConfigEcho,
    pub cells: Vec<CellReport>,
    pub total_violations: usize,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_s: Option<f64>,
}

impl SuiteReport {
    fn new(suite: &str, cfg: &SuiteConfig, cells: Vec<CellReport>, started: Instant) -> Self {
        let total_violations = cells.iter().filter(|c| c.counted).map(|c| c.violation_count).sum();
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            suite: suite.to_string(),
            config: cfg.echo(),
            cells,
            total_violations,
            passed: total_violations == 0,
            wall_time_s: cfg.timing.then(|| started.elapsed().as_secs_f64()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunAllReport {
    pub version: String,
    pub seed: u64,
    pub suites: Vec<SuiteReport>,
    pub total_violations: usize,
    pub passed: bool,
}

pub fn run_all(cfg: &SuiteConfig) -> Result<RunAllReport> {
    cfg.validate()?;
    let suites = vec![
        suite_gradient_equals_fundamental(cfg)?,
        suite_commutators(cfg)?,
        suite_metric_properties(cfg)?,
        suite_kappa_scan(cfg)?,
        suite_action_structure(cfg)?,
    ];
    let total_violations = suites.iter().map(|s| s.total_violations).sum();
    Ok(RunAllReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: cfg.seed,
        suites,
        total_violations,
        passed: total_violations == 0,
    })
}

/// How a residual is compared with the tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Norm {
    /// `|x - y|`.
    Absolute,
    /// `|x - y| / |y|`.
    Relative,
    /// `|x - y| / max(1, |y|)`.
    Mixed,
}

impl Norm {
    pub(crate) fn apply(self, diff: f64, reference: f64) -> f64 {
        match self {
            Self::Absolute => diff,
            Self::Relative => crate::config::relative(diff, reference),
            Self::Mixed => crate::config::mixed(diff, reference),
        }
    }
}

/// Coordinates of one cell.
#[derive(Debug, Clone)]
pub(crate) struct Cell {
    pub suite: &'static str,
    pub check: String,
    pub n: Option<usize>,
    pub kappa: Option<f64>,
    pub spec: Option<String>,
    pub trials: usize,
    pub tolerance: f64,
}

impl Cell {
    pub fn new(suite: &'static str, check: impl Into<String>, tolerance: f64, trials: usize) -> Self {
        Self { suite, check: check.into(), n: None, kappa: None, spec: None, trials, tolerance }
    }

    pub fn n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    pub fn kappa(mut self, k: f64) -> Self {
        self.kappa = Some(k);
        self
    }

    pub fn spec(mut self, s: impl ToString) -> Self {
        self.spec = Some(s.to_string());
        self
    }

    pub fn seed(&self, master: u64) -> u64 {
        derive_seed(
            master,
            &[
                coord_str(self.suite),
                coord_str(&self.check),
                self.n.unwrap_or(0) as u64,
                coord_f64(self.kappa.unwrap_or(0.0)),
                coord_str(self.spec.as_deref().unwrap_or("")),
            ],
        )
    }

    pub fn report(&self, seed: u64) -> CellReport {
        CellReport {
            suite: self.suite.to_string(),
            check: self.check.clone(),
            n: self.n,
            kappa: self.kappa,
            spec: self.spec.clone(),
            trials: self.trials,
            skipped: 0,
            max_abs_residual: 0.0,
            tolerance: self.tolerance,
            violation_count: 0,
            violations: Vec::new(),
            seed,
            counted: true,
            witness: None,
            derivative: None,
            note: None,
        }
    }

    /// Runs `trial` once per trial index with its own sampler. `Ok(None)`
    /// and conditioning errors count as skipped; the residual of each
    /// remaining trial is compared with the tolerance.
    pub fn run<F>(&self, master: u64, trial: F) -> Result<CellReport>
    where
        F: Fn(&mut Sampler) -> Result<Option<f64>> + Sync,
    {
        let seed = self.seed(master);
        let one = |t: usize| {
            let mut s = Sampler::new(derive_seed(seed, &[t as u64]));
            trial(&mut s)
        };
        #[cfg(feature = "parallel")]
        let results: Vec<Result<Option<f64>>> = {
            use rayon::prelude::*;
            (0..self.trials).into_par_iter().map(one).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let results: Vec<Result<Option<f64>>> = (0..self.trials).map(one).collect();

        let mut report = self.report(seed);
        for (t, r) in results.into_iter().enumerate() {
            match r {
                Ok(Some(residual)) => {
                    let bad = !(residual <= self.tolerance);
                    if residual.is_finite() {
                        report.max_abs_residual = report.max_abs_residual.max(residual);
                    } else {
                        report.max_abs_residual = f64::MAX;
                    }
                    if bad {
                        report.violation_count += 1;
                        if report.violations.len() < MAX_LISTED_VIOLATIONS {
                            report.violations.push(Violation { trial: t, residual: finite_or_max(residual) });
                        }
                    }
                }
                Ok(None) => report.skipped += 1,
                Err(e) if is_conditioning(&e) => report.skipped += 1,
                Err(e) => return Err(e),
            }
        }
        Ok(report)
    }

    /// A cell holding a single deterministic evaluation.
    pub fn single(&self, master: u64, residual: f64) -> CellReport {
        let mut report = self.report(self.seed(master));
        report.max_abs_residual = finite_or_max(residual);
        if !(residual <= self.tolerance) {
            report.violation_count = 1;
            report.violations.push(Violation { trial: 0, residual: finite_or_max(residual) });
        }
        report
    }
}

fn finite_or_max(x: f64) -> f64 {
    if x.is_finite() {
        x
    } else {
        f64::MAX
    }
}

/// Errors caused by an ill-conditioned random sample rather than by a bug.
pub(crate) fn is_conditioning(e: &Error) -> bool {
    matches!(
        e,
        Error::NotPositive { .. } | Error::Domain(_) | Error::NotInvertible(_) | Error::NoConvergence { .. }
    )
}

/// `||x - y||_F` scaled by `norm` against `||y||_F`.
pub(crate) fn residual(norm: Norm, x: &crate::matrix::HermitianMatrix, y: &crate::matrix::HermitianMatrix) -> f64 {
    norm.apply(x.distance(y), y.frobenius_norm())
}

/// Writes a suite or run-all report as CSV: one row per cell.
#[cfg(feature = "cli")]
pub fn write_csv<W: std::io::Write>(suites: &[SuiteReport], out: W) -> Result<()> {
    #[derive(Serialize)]
    struct Row<'a> {
        suite: &'a str,
        check: &'a str,
        n: Option<usize>,
        kappa: Option<f64>,
        spec: Option<&'a str>,
        trials: usize,
        skipped: usize,
        max_abs_residual: f64,
        tolerance: f64,
        violations: usize,
        counted: bool,
        passed: bool,
        seed: u64,
        witness_min_eigenvalue: Option<f64>,
        derivative_at_zero: Option<String>,
        note: Option<&'a str>,
    }
    let mut w = csv::Writer::from_writer(out);
    for s in suites {
        for c in &s.cells {
            let row = Row {
                suite: &c.suite,
                check: &c.check,
                n: c.n,
                kappa: c.kappa,
                spec: c.spec.as_deref(),
                trials: c.trials,
                skipped: c.skipped,
                max_abs_residual: c.max_abs_residual,
                tolerance: c.tolerance,
                violations: c.violation_count,
                counted: c.counted,
                passed: c.passed(),
                seed: c.seed,
                witness_min_eigenvalue: c.witness.as_ref().map(|w| w.min_eigenvalue),
                derivative_at_zero: c.derivative.map(|d| match d {
                    crate::monotone::DerivativeAtZero::Finite(v) => format!("{v}"),
                    crate::monotone::DerivativeAtZero::PosInfinity => "+inf".into(),
                }),
                note: c.note.as_deref(),
            };
            w.serialize(row).map_err(|e| Error::Parse(e.to_string()))?;
        }
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(())
}
