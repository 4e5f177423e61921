//! Properties of the Petz metrics: `K(rho) = rho^2`, duality of gradients,
//! unitary invariance, the commuting (classical) reduction, contraction
//! under channels, and the two ways of rescaling the BKM metric.

use std::time::Instant;

use super::{residual, Cell, Norm, SuiteConfig, SuiteReport};
use crate::channel::{cptp_contraction_check, ChannelFamily, ContractionSweep};
use crate::error::Result;
use crate::matrix::HermitianMatrix;
use crate::monotone::MonotoneFunctionSpec;
use crate::petz::{build_k, fisher_rao_eval, gradient_field, metric_eval, MetricSpec};
use crate::random::Sampler;
use crate::state::{expectation, DensityState, TangentVector};

const SUITE: &str = "metric";

/// Tangent vectors drawn per trial for the duality check.
const DUALITY_PROBES: usize = 5;

/// Whether a spec is expected to give a monotone metric.
pub(crate) fn expected_monotone(spec: &MonotoneFunctionSpec) -> bool {
    match spec.kappa() {
        Some(k) => k <= 1.0,
        None => spec.is_symmetric_family(),
    }
}

/// Traceless diagonal vector in the eigenbasis of `rho`, with its
/// eigenbasis components.
fn commuting_tangent(s: &mut Sampler, rho: &DensityState) -> Result<(TangentVector, Vec<f64>)> {
    let n = rho.dim();
    let mut u: Vec<f64> = (0..n).map(|_| s.normal()).collect();
    let mean = u.iter().sum::<f64>() / n as f64;
    u.iter_mut().for_each(|x| *x -= mean);
    let v = rho.spectral().synthesize(&u);
    Ok((TangentVector::state(v)?, u))
}

pub fn suite_metric_properties(cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let started = Instant::now();
    let tol = cfg.tolerances();
    let mut cells = Vec::new();
    for &n in &cfg.dims {
        for &spec in &cfg.specs {
            let unit = spec.with_scale(1.0)?;
            let cell = Cell::new(SUITE, "k-rho-squared", tol.structural, cfg.trials).n(n).spec(unit);
            cells.push(cell.run(cfg.seed, |s| {
                let rho = s.density(n);
                let k = build_k(&rho, &unit)?;
                let m = rho.matrix().matrix();
                let square = HermitianMatrix::from_hermitian_part(&(m * m));
                Ok(Some(residual(Norm::Absolute, &k.apply(rho.matrix())?, &square)))
            })?);

            let m = MetricSpec::unit(spec);
            let cell = Cell::new(SUITE, "gradient-duality", tol.analytic, cfg.trials).n(n).spec(spec);
            cells.push(cell.run(cfg.seed, |s| {
                let rho = s.density(n);
                let a = s.hermitian(n);
                let g = gradient_field(&m, &a, &rho)?;
                let mut worst = 0.0f64;
                for _ in 0..DUALITY_PROBES {
                    let v = s.tangent(&rho);
                    let lhs = metric_eval(&m, &rho, &g, &v)?;
                    let rhs = expectation(&a, v.matrix())?;
                    worst = worst.max((lhs - rhs).abs() / (1.0 + rhs.abs()));
                }
                Ok(Some(worst))
            })?);

            let cell = Cell::new(SUITE, "killing", tol.structural, cfg.trials).n(n).spec(spec);
            cells.push(cell.run(cfg.seed, |s| {
                let rho = s.density(n);
                let (v, w) = (s.tangent(&rho), s.tangent(&rho));
                let u = s.unitary(n);
                let before = metric_eval(&m, &rho, &v, &w)?;
                let moved = DensityState::new(rho.matrix().conjugate_by(&u)?)?;
                let uv = TangentVector::state(v.matrix().conjugate_by(&u)?)?;
                let uw = TangentVector::state(w.matrix().conjugate_by(&u)?)?;
                let after = metric_eval(&m, &moved, &uv, &uw)?;
                Ok(Some(Norm::Mixed.apply((after - before).abs(), before)))
            })?);

            let cell = Cell::new(SUITE, "fisher-rao-reduction", tol.structural, cfg.trials).n(n).spec(spec);
            cells.push(cell.run(cfg.seed, |s| {
                let rho = s.density(n);
                let (v, u) = commuting_tangent(s, &rho)?;
                let (w, x) = commuting_tangent(s, &rho)?;
                let quantum = metric_eval(&m, &rho, &v, &w)? / spec.scale;
                let p = rho.spectral().eigenvalues();
                let total: f64 = p.iter().sum();
                let p: Vec<f64> = p.iter().map(|q| q / total).collect();
                let classical = fisher_rao_eval(&p, &u, &x)?;
                Ok(Some(Norm::Mixed.apply((quantum - classical).abs(), classical)))
            })?);

            let monotone = expected_monotone(&spec);
            let mut sweep = ContractionSweep::new(ChannelFamily::Random, n, cfg.trials, 0);
            sweep.violation = tol.violation;
            sweep.adversarial = !monotone;
            let cell = Cell::new(SUITE, "cptp-contraction", tol.violation, cfg.trials).n(n).spec(spec);
            sweep.seed = cell.seed(cfg.seed);
            let r = cptp_contraction_check(&m, &sweep)?;
            let mut report = cell.report(sweep.seed);
            report.skipped = r.skipped;
            report.max_abs_residual = (-r.min_margin).max(0.0);
            report.violation_count = r.violations.len();
            report.violations = r
                .violations
                .iter()
                .take(super::MAX_LISTED_VIOLATIONS)
                .map(|&trial| super::Violation { trial, residual: report.max_abs_residual })
                .collect();
            report.counted = monotone;
            if !monotone {
                report.note = Some(if r.violations.is_empty() {
                    format!("informational: no contraction violation found at {} trials", cfg.trials)
                } else {
                    "informational: contraction violated, as allowed for a non-monotone function".into()
                });
            }
            cells.push(report);
        }

        for &kappa in &cfg.kappas {
            let base = MetricSpec::unit(MonotoneFunctionSpec::bkm());
            let by_function = MetricSpec::unit(MonotoneFunctionSpec::bkm().with_scale(kappa)?);
            let by_prefactor = MetricSpec::new(MonotoneFunctionSpec::bkm(), kappa)?;

            let cell = Cell::new(SUITE, "bkm-function-scaling", tol.analytic, cfg.trials).n(n).kappa(kappa).spec("bkm");
            cells.push(cell.run(cfg.seed, |s| {
                let rho = s.density(n);
                let a = s.hermitian(n);
                let g = gradient_field(&by_function, &a, &rho)?;
                let expected = gradient_field(&base, &a, &rho)?.matrix().scale(kappa);
                Ok(Some(residual(Norm::Relative, g.matrix(), &expected)))
            })?);

            let cell = Cell::new(SUITE, "bkm-prefactor-scaling", tol.analytic, cfg.trials).n(n).kappa(kappa).spec("bkm");
            cells.push(cell.run(cfg.seed, |s| {
                let rho = s.density(n);
                let a = s.hermitian(n);
                let g = gradient_field(&by_prefactor, &a, &rho)?;
                let expected = gradient_field(&base, &a, &rho)?.matrix().scale(1.0 / kappa);
                Ok(Some(residual(Norm::Relative, g.matrix(), &expected)))
            })?);
        }
    }
    Ok(SuiteReport::new(SUITE, cfg, cells, started))
}
