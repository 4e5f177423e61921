//! Gradients of expectation value functions against fundamental fields of
//! the deformed actions, and the fields against finite-difference flows.

use std::time::Instant;

use super::{residual, Cell, Norm, SuiteConfig, SuiteReport};
use crate::actions::{flow_fundamental_numeric, fund_w_phi, fund_z_phi, Action, DeformationParam, LieDirection, Point};
use crate::error::Result;
use crate::monotone::MonotoneFunctionSpec;
use crate::petz::{gradient_field, MetricSpec};

const SUITE: &str = "gradient";

pub fn suite_gradient_equals_fundamental(cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let started = Instant::now();
    let tol = cfg.tolerances();
    let mut cells = Vec::new();
    for &n in &cfg.dims {
        for &kappa in &cfg.kappas {
            let k = DeformationParam::new(kappa)?;
            let gl = MetricSpec::new(MonotoneFunctionSpec::gl(kappa)?, kappa)?;
            let bkm = MetricSpec::new(MonotoneFunctionSpec::bkm(), kappa)?;

            let cell = Cell::new(SUITE, "gl-gradient-vs-z-phi", tol.analytic, cfg.trials).n(n).kappa(kappa).spec(gl.function);
            cells.push(cell.run(cfg.seed, |s| {
                let rho = s.density(n);
                let a = s.hermitian(n);
                let grad = gradient_field(&gl, &a, &rho)?;
                let z = fund_z_phi(&a, &rho, k)?;
                Ok(Some(residual(Norm::Relative, grad.matrix(), z.matrix())))
            })?);

            let cell = Cell::new(SUITE, "beta-kappa-field-vs-flow", tol.numeric, cfg.trials).n(n).kappa(kappa);
            cells.push(cell.run(cfg.seed, |s| {
                let rho = s.density(n);
                let dir = LieDirection::new(s.hermitian(n), s.hermitian(n))?;
                let act = Action::BetaKappa(k);
                let x = Point::State(rho);
                let exact = act.fundamental_field(&dir, &x)?;
                let fd = flow_fundamental_numeric(&act, &dir, &x, tol.fd_step, false)?;
                Ok(Some(residual(Norm::Relative, &fd, &exact)))
            })?);

            let cell = Cell::new(SUITE, "bkm-gradient-vs-w-phi", tol.analytic, cfg.trials).n(n).kappa(kappa).spec("bkm");
            cells.push(cell.run(cfg.seed, |s| {
                let rho = s.density(n);
                let a = s.hermitian(n);
                let grad = gradient_field(&bkm, &a, &rho)?;
                let w = fund_w_phi(&a, &rho, k)?;
                Ok(Some(residual(Norm::Relative, grad.matrix(), w.matrix())))
            })?);

            let cell = Cell::new(SUITE, "gamma-kappa-field-vs-flow", tol.numeric, cfg.trials).n(n).kappa(kappa);
            cells.push(cell.run(cfg.seed, |s| {
                let rho = s.density(n);
                let dir = LieDirection::new(s.hermitian(n), s.hermitian(n))?;
                let act = Action::GammaKappa(k);
                let x = Point::State(rho);
                let exact = act.fundamental_field(&dir, &x)?;
                let fd = flow_fundamental_numeric(&act, &dir, &x, tol.fd_step, false)?;
                Ok(Some(residual(Norm::Relative, &fd, &exact)))
            })?);
        }
    }
    Ok(SuiteReport::new(SUITE, cfg, cells, started))
}
