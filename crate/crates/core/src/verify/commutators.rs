//! Lie brackets of fundamental and gradient vector fields.
//!
//! The bracket of fields `X`, `Y` is `[X, Y](x) = DY(x)[X(x)] - DX(x)[Y(x)]`,
//! with directional derivatives taken by Richardson-extrapolated central
//! differences of the closed-form fields.

use std::time::Instant;

use super::{residual, Cell, Norm, SuiteConfig, SuiteReport};
use crate::actions::fund_x;
use crate::error::Result;
use crate::matrix::{anticomm, comm, HermitianMatrix};
use crate::monotone::MonotoneFunctionSpec;
use crate::petz::{gradient_field, MetricSpec};
use crate::spectral::unitary_exp;
use crate::state::{expectation, DensityState, PositiveOperator};

const SUITE: &str = "commutators";

type Field<'a> = Box<dyn Fn(&HermitianMatrix) -> Result<HermitianMatrix> + Sync + 'a>;

/// `(4 D(h/2) - D(h))/3` with `D(h) = (F(x + h v) - F(x - h v))/(2h)`.
fn directional(field: &Field, x: &HermitianMatrix, v: &HermitianMatrix, h: f64) -> Result<HermitianMatrix> {
    let central = |h: f64| -> Result<HermitianMatrix> {
        let plus = field(&x.axpy(h, v)?)?;
        let minus = field(&x.axpy(-h, v)?)?;
        Ok(plus.sub(&minus)?.scale(0.5 / h))
    };
    let coarse = central(h)?;
    let fine = central(0.5 * h)?;
    fine.scale(4.0 / 3.0).axpy(-1.0 / 3.0, &coarse)
}

pub(crate) fn bracket(x_field: &Field, y_field: &Field, at: &HermitianMatrix, h: f64) -> Result<HermitianMatrix> {
    let xv = x_field(at)?;
    let yv = y_field(at)?;
    directional(y_field, at, &xv, h)?.sub(&directional(x_field, at, &yv, h)?)
}

fn state_at(m: &HermitianMatrix) -> Result<DensityState> {
    DensityState::new(m.clone())
}

fn rotation_field<'a>(b: &'a HermitianMatrix) -> Field<'a> {
    Box::new(move |x| fund_x(b, x))
}

fn gradient_field_of<'a>(m: &'a MetricSpec, c: &'a HermitianMatrix) -> Field<'a> {
    Box::new(move |x| Ok(gradient_field(m, c, &state_at(x)?)?.into_matrix()))
}

fn dilation_field_of<'a>(a: &'a HermitianMatrix) -> Field<'a> {
    Box::new(move |x| {
        PositiveOperator::new(x.clone())?;
        anticomm(x, a)
    })
}

/// Specs from the config plus one family member per configured kappa,
/// without duplicates.
fn bracket_specs(cfg: &SuiteConfig) -> Result<Vec<MonotoneFunctionSpec>> {
    let mut out: Vec<MonotoneFunctionSpec> = cfg.specs.clone();
    for &k in &cfg.kappas {
        let s = MonotoneFunctionSpec::gl(k)?;
        if !out.iter().any(|t| t.to_string() == s.to_string()) {
            out.push(s);
        }
    }
    Ok(out)
}

pub fn suite_commutators(cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let started = Instant::now();
    let tol = cfg.tolerances();
    let h = tol.bracket_step;
    let mut cells = Vec::new();
    for &n in &cfg.dims {
        let cell = Cell::new(SUITE, "x-x", tol.bracket, cfg.trials).n(n);
        cells.push(cell.run(cfg.seed, |s| {
            let rho = s.density(n);
            let (b, c) = (s.hermitian(n), s.hermitian(n));
            let lhs = bracket(&rotation_field(&b), &rotation_field(&c), rho.matrix(), h)?;
            let rhs = fund_x(&comm(&b, &c)?, rho.matrix())?;
            Ok(Some(residual(Norm::Mixed, &lhs, &rhs)))
        })?);

        for spec in bracket_specs(cfg)? {
            let m = MetricSpec::unit(spec);
            let cell = Cell::new(SUITE, "x-grad", tol.bracket, cfg.trials).n(n).spec(spec);
            cells.push(cell.run(cfg.seed, |s| {
                let rho = s.density(n);
                let (b, c) = (s.hermitian(n), s.hermitian(n));
                let lhs = bracket(&rotation_field(&b), &gradient_field_of(&m, &c), rho.matrix(), h)?;
                let bc = comm(&b, &c)?;
                let rhs = gradient_field(&m, &bc, &rho)?;
                Ok(Some(residual(Norm::Mixed, &lhs, rhs.matrix())))
            })?);
        }

        let cell = Cell::new(SUITE, "yhat-yhat", tol.bracket, cfg.trials).n(n);
        cells.push(cell.run(cfg.seed, |s| {
            let omega = s.positive(n);
            let (a, b) = (s.hermitian(n), s.hermitian(n));
            let lhs = bracket(&dilation_field_of(&a), &dilation_field_of(&b), omega.matrix(), h)?;
            let rhs = fund_x(&comm(&b, &a)?, omega.matrix())?;
            Ok(Some(residual(Norm::Mixed, &lhs, &rhs)))
        })?);

        let cell = Cell::new(SUITE, "expectation-transport", tol.flow, cfg.trials).n(n);
        cells.push(cell.run(cfg.seed, |s| {
            let rho = s.density(n);
            let (a, b) = (s.hermitian(n), s.hermitian(n));
            let l = |t: f64| -> Result<f64> {
                let moved = rho.matrix().conjugate_by(&unitary_exp(&b, 0.5 * t)?)?;
                expectation(&a, &moved)
            };
            let fd = (l(tol.fd_step)? - l(-tol.fd_step)?) / (2.0 * tol.fd_step);
            let exact = expectation(&comm(&b, &a)?, rho.matrix())?;
            Ok(Some(Norm::Mixed.apply((fd - exact).abs(), exact)))
        })?);
    }
    Ok(SuiteReport::new(SUITE, cfg, cells, started))
}
