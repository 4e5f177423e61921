//! The operator-monotonicity boundary of the family `f_kappa`: a guided
//! witness search per `(kappa, n)`, the slope at `0+`, symmetry, the
//! rational rewriting for rational `kappa`, and the two named special cases.

use std::time::Instant;

use super::{Cell, CellReport, SuiteConfig, SuiteReport, Violation, WitnessReport};
use crate::error::Result;
use crate::monotone::{
    check_symmetry, derivative_at_zero_plus, gl_rational_decomposition, log_grid, matrix_monotonicity_witness,
    standard_grid, DerivativeAtZero, MonotoneFunctionSpec, WITNESS_THRESHOLD,
};

const SUITE: &str = "kappa-scan";

/// Largest denominator tried when recognizing a rational `kappa`.
const MAX_DENOMINATOR: u32 = 12;

/// Below this `kappa` the slope estimate at `0+` is dominated by the
/// `x^(kappa - 1)` correction and is reported without a verdict.
const SLOPE_COUNTED_FROM: f64 = 1.5;

const SLOPE_TOLERANCE: f64 = 1e-3;

/// Points in the special-case grid.
const SPECIAL_GRID: usize = 50;

/// `(k, m)` with `kappa = k/m`, `0 < k < m <= MAX_DENOMINATOR`.
fn as_fraction(kappa: f64) -> Option<(u32, u32)> {
    (2..=MAX_DENOMINATOR).find_map(|m| {
        let k = (kappa * m as f64).round();
        let exact = (kappa * m as f64 - k).abs() < 1e-12;
        (exact && k >= 1.0 && (k as u32) < m).then_some((k as u32, m))
    })
}

fn witness_cell(cfg: &SuiteConfig, spec: MonotoneFunctionSpec, kappa: f64, n: usize) -> Result<CellReport> {
    let cell = Cell::new(SUITE, "witness", -WITNESS_THRESHOLD, cfg.trials).n(n).kappa(kappa).spec(spec);
    let seed = cell.seed(cfg.seed);
    let found = matrix_monotonicity_witness(&spec, n, cfg.trials, seed)?;
    let mut report = cell.report(seed);
    let expected_monotone = kappa <= 1.0;
    match found {
        Some(w) => {
            report.max_abs_residual = -w.min_eigenvalue;
            if expected_monotone {
                report.violation_count = 1;
                report.violations.push(Violation { trial: w.trial, residual: -w.min_eigenvalue });
            } else {
                report.note = Some(format!("witness at trial {}", w.trial));
            }
            report.witness = Some(WitnessReport {
                trial: w.trial,
                min_eigenvalue: w.min_eigenvalue,
                a: w.a.matrix().to_json(),
                b: w.b.matrix().to_json(),
            });
        }
        None => report.note = Some(format!("no violation found at {} trials", cfg.trials)),
    }
    Ok(report)
}

fn derivative_cell(cfg: &SuiteConfig, spec: MonotoneFunctionSpec, kappa: f64) -> Result<CellReport> {
    let d = derivative_at_zero_plus(&spec)?;
    let (residual, tolerance, counted) = if kappa < 1.0 {
        // The slope diverges; any finite answer is wrong.
        (if d == DerivativeAtZero::PosInfinity { 0.0 } else { f64::INFINITY }, 0.0, true)
    } else {
        let target = if kappa == 1.0 { 0.5 } else { -0.5 * kappa };
        let r = d.finite().map_or(f64::INFINITY, |v| (v - target).abs());
        (r, SLOPE_TOLERANCE, kappa <= 1.0 || kappa >= SLOPE_COUNTED_FROM)
    };
    let cell = Cell::new(SUITE, "derivative-at-zero", tolerance, 1).kappa(kappa).spec(spec);
    let mut report = cell.single(cfg.seed, residual);
    report.derivative = Some(d);
    if !counted {
        report.counted = false;
        report.note = Some(format!("slope converges like x^{:.2}; reported only", kappa - 1.0));
    }
    Ok(report)
}

pub fn suite_kappa_scan(cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let started = Instant::now();
    let tol = cfg.tolerances();
    let mut cells = Vec::new();
    for &kappa in &cfg.kappas {
        let spec = MonotoneFunctionSpec::gl(kappa)?;
        for &n in &cfg.dims {
            cells.push(witness_cell(cfg, spec, kappa, n)?);
        }
        cells.push(derivative_cell(cfg, spec, kappa)?);

        let sym = check_symmetry(&spec, &standard_grid())?;
        let cell = Cell::new(SUITE, "symmetry", tol.structural, 1).kappa(kappa).spec(spec);
        cells.push(cell.single(cfg.seed, sym.max_symmetry_residual.max(sym.normalization_residual)));

        if let Some((k, m)) = as_fraction(kappa) {
            let mut worst = 0.0f64;
            for x in standard_grid() {
                let direct = spec.eval(x)?;
                let rewritten = gl_rational_decomposition(k, m, x)?;
                worst = worst.max((direct - rewritten).abs() / direct.abs());
            }
            let cell = Cell::new(SUITE, "rational-decomposition", tol.structural, 1).kappa(kappa).spec(spec);
            let mut report = cell.single(cfg.seed, worst);
            report.note = Some(format!("kappa = {k}/{m}"));
            cells.push(report);
        }
    }

    let grid = log_grid(1e-3, 1e3, SPECIAL_GRID);
    let special: [(&str, f64, fn(f64) -> f64); 2] = [
        ("special-case-bures-helstrom", 1.0, |x| (1.0 + x) / 2.0),
        ("special-case-wigner-yanase", 0.5, |x| (x.sqrt() + 1.0).powi(2) / 4.0),
    ];
    for (check, kappa, oracle) in special {
        let spec = MonotoneFunctionSpec::gl(kappa)?;
        let mut worst = 0.0f64;
        for &x in &grid {
            let want = oracle(x);
            worst = worst.max((spec.eval(x)? - want).abs() / want);
        }
        cells.push(Cell::new(SUITE, check, tol.exact, 1).kappa(kappa).spec(spec).single(cfg.seed, worst));
    }
    Ok(SuiteReport::new(SUITE, cfg, cells, started))
}
