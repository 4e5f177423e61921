//! Structure of the group actions: axioms, restriction to the unitary
//! group, intertwining with the projection onto states, the conjugacies
//! that define the deformed actions, and relatedness of their fields.

use std::time::Instant;

use num_complex::Complex64;

use super::{residual, Cell, Norm, SuiteConfig, SuiteReport};
use crate::actions::{
    act_alpha, act_beta, act_beta_hat, act_beta_kappa, act_gamma_hat, act_gamma_kappa, fund_w, fund_w_hat, fund_y,
    fund_y_hat, fund_z_phi_hat, phi_related_y_hat, transitivity_element, Action, CotangentElement, DeformationParam,
    GLElement, GroupElement, Point,
};
use crate::error::Result;
use crate::matrix::{ComplexMatrix, HermitianMatrix};
use crate::random::Sampler;
use crate::spectral::hermitian_eig;
use crate::state::{dilation_field, expectation, immerse, DensityState, PositiveOperator};

const SUITE: &str = "actions";

/// Frobenius norm of random cotangent shifts, so that `exp` stays tame.
const SHIFT_NORM: f64 = 0.3;

/// Deformation parameters always covered by the restriction check.
const RESTRICTION_KAPPAS: [f64; 3] = [0.3, 0.5, 1.0];

fn shift(s: &mut Sampler, n: usize) -> HermitianMatrix {
    let a = s.hermitian(n);
    a.scale(SHIFT_NORM / a.frobenius_norm())
}

fn cotangent(s: &mut Sampler, n: usize) -> Result<CotangentElement> {
    CotangentElement::new(s.unitary(n), shift(s, n))
}

fn element(action: &Action, s: &mut Sampler, n: usize) -> Result<GroupElement> {
    Ok(match action {
        Action::Alpha => GroupElement::Gl(GLElement::new(s.unitary(n))?),
        Action::BetaHat | Action::Beta | Action::BetaKappa(_) => GroupElement::Gl(GLElement::new(s.gl_element(n))?),
        _ => GroupElement::Cotangent(cotangent(s, n)?),
    })
}

fn point(action: &Action, s: &mut Sampler, n: usize) -> Point {
    match action {
        Action::BetaHat | Action::GammaHat => Point::Cone(s.positive(n)),
        Action::Zeta => Point::Hermitian(s.hermitian(n)),
        _ => Point::State(s.density(n)),
    }
}

/// `m / Tr(m)` on a general complex matrix, trace taken in full.
fn normalize_complex(m: &ComplexMatrix) -> HermitianMatrix {
    let t = m.trace();
    m.scale(Complex64::new(1.0, 0.0) / t).hermitian_part()
}

fn actions_for(cfg: &SuiteConfig) -> Result<Vec<Action>> {
    let mut out = vec![Action::Alpha, Action::BetaHat, Action::Beta, Action::GammaHat, Action::Zeta];
    for &k in &cfg.kappas {
        let k = DeformationParam::new(k)?;
        out.push(Action::BetaKappa(k));
        out.push(Action::GammaKappa(k));
    }
    Ok(out)
}

fn restriction_kappas(cfg: &SuiteConfig) -> Vec<f64> {
    let mut ks: Vec<f64> = RESTRICTION_KAPPAS.to_vec();
    for &k in &cfg.kappas {
        if !ks.contains(&k) {
            ks.push(k);
        }
    }
    ks
}

pub fn suite_action_structure(cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let started = Instant::now();
    let tol = cfg.tolerances();
    let mut cells = Vec::new();
    for &n in &cfg.dims {
        for action in actions_for(cfg)? {
            let kappa = match action {
                Action::BetaKappa(k) | Action::GammaKappa(k) => Some(k.kappa()),
                _ => None,
            };
            let base = |check: &str, tolerance: f64| {
                let c = Cell::new(SUITE, format!("{check}:{}", action.name()), tolerance, cfg.trials).n(n);
                match kappa {
                    Some(k) => c.kappa(k),
                    None => c,
                }
            };
            cells.push(base("identity", tol.exact).run(cfg.seed, |s| {
                let x = point(&action, s, n);
                let moved = action.apply(&action.identity(n), &x)?;
                Ok(Some(residual(Norm::Mixed, moved.matrix(), x.matrix())))
            })?);
            cells.push(base("composition", tol.structural).run(cfg.seed, |s| {
                let (g, h) = (element(&action, s, n)?, element(&action, s, n)?);
                let x = point(&action, s, n);
                let stepwise = action.apply(&g, &action.apply(&h, &x)?)?;
                let composed = action.apply(&g.compose(&h)?, &x)?;
                Ok(Some(residual(Norm::Mixed, stepwise.matrix(), composed.matrix())))
            })?);
        }

        for kappa in restriction_kappas(cfg) {
            let k = DeformationParam::new(kappa)?;
            let cell = Cell::new(SUITE, "restriction-beta-kappa", tol.structural, cfg.trials).n(n).kappa(kappa);
            cells.push(cell.run(cfg.seed, |s| {
                let rho = s.density(n);
                let u = s.unitary(n);
                let deformed = act_beta_kappa(&GLElement::new(u.clone())?, &rho, k)?;
                Ok(Some(residual(Norm::Mixed, deformed.matrix(), &act_alpha(&u, rho.matrix())?)))
            })?);
            let cell = Cell::new(SUITE, "restriction-gamma-kappa", tol.structural, cfg.trials).n(n).kappa(kappa);
            cells.push(cell.run(cfg.seed, |s| {
                let rho = s.density(n);
                let u = s.unitary(n);
                let e = CotangentElement::new(u.clone(), HermitianMatrix::zeros(n))?;
                let deformed = act_gamma_kappa(&e, &rho, k)?;
                Ok(Some(residual(Norm::Mixed, deformed.matrix(), &act_alpha(&u, rho.matrix())?)))
            })?);
        }

        let cell = Cell::new(SUITE, "intertwining-beta", tol.exact, cfg.trials).n(n);
        cells.push(cell.run(cfg.seed, |s| {
            let rho = s.density(n);
            let g = GLElement::new(s.gl_element(n))?;
            let direct = act_beta(&g, &rho)?;
            let m = &(g.matrix() * rho.matrix().matrix()) * &g.matrix().adjoint();
            Ok(Some(residual(Norm::Mixed, direct.matrix(), &normalize_complex(&m))))
        })?);

        let cell = Cell::new(SUITE, "intertwining-gamma", tol.exact, cfg.trials).n(n);
        cells.push(cell.run(cfg.seed, |s| {
            let rho = s.density(n);
            let e = cotangent(s, n)?;
            let direct = act_gamma_kappa(&e, &rho, DeformationParam::new(1.0)?)?;
            let cone = act_gamma_hat(&e, &immerse(&rho))?;
            let via_cone = normalize_complex(cone.matrix().matrix());
            Ok(Some(residual(Norm::Mixed, direct.matrix(), &via_cone)))
        })?);

        let cell = Cell::new(SUITE, "zeta-conjugation", tol.structural, cfg.trials).n(n);
        cells.push(cell.run(cfg.seed, |s| {
            let omega = s.positive(n);
            let e = cotangent(s, n)?;
            let direct = act_gamma_hat(&e, &omega)?;
            let log = omega.spectral().matrix_log()?;
            let moved = &(&(e.unitary() * log.matrix()) * &e.unitary().adjoint()) + e.shift().matrix();
            let via_series = moved.expm_general().hermitian_part();
            Ok(Some(residual(Norm::Mixed, direct.matrix(), &via_series)))
        })?);

        for &kappa in &cfg.kappas {
            let k = DeformationParam::new(kappa)?;
            let cell = Cell::new(SUITE, "deformation-conjugacy", tol.structural, cfg.trials).n(n).kappa(kappa);
            cells.push(cell.run(cfg.seed, |s| {
                let rho = s.density(n);
                let g = GLElement::new(s.gl_element(n))?;
                let direct = act_beta_kappa(&g, &rho, k)?;
                let log = rho.spectral().matrix_log()?;
                let lifted = PositiveOperator::new(hermitian_eig(&log.scale(kappa))?.matrix_exp()?)?;
                let moved = act_beta_hat(&g, &lifted)?;
                let log_moved = moved.spectral().matrix_log()?;
                let back = hermitian_eig(&log_moved.scale(1.0 / kappa))?.matrix_exp()?;
                let expected = back.scale(1.0 / back.trace());
                Ok(Some(residual(Norm::Mixed, direct.matrix(), &expected)))
            })?);

            let cell = Cell::new(SUITE, "phi-relatedness", tol.analytic, cfg.trials).n(n).kappa(kappa);
            cells.push(cell.run(cfg.seed, |s| {
                let omega = s.positive(n);
                let a = s.hermitian(n);
                let z = fund_z_phi_hat(&a, &omega, k)?;
                let pulled = phi_related_y_hat(&a, &omega, k)?;
                Ok(Some(residual(Norm::Relative, z.matrix(), &pulled)))
            })?);
        }

        // Cone field minus the expectation value times the dilation field.
        let cell = Cell::new(SUITE, "i-relatedness-y", tol.exact, cfg.trials).n(n);
        cells.push(cell.run(cfg.seed, |s| {
            let rho = s.density(n);
            let a = s.hermitian(n);
            let on_states = fund_y(&a, &rho)?;
            let cone = fund_y_hat(&a, &immerse(&rho))?.into_matrix();
            let lifted = cone.axpy(-expectation(&a, rho.matrix())?, dilation_field(&immerse(&rho)).matrix())?;
            Ok(Some(residual(Norm::Mixed, on_states.matrix(), &lifted)))
        })?);

        // Pushforward by the projection at a unit-trace point: v - rho Tr(v).
        let cell = Cell::new(SUITE, "i-relatedness-w", tol.exact, cfg.trials).n(n);
        cells.push(cell.run(cfg.seed, |s| {
            let rho = s.density(n);
            let a = s.hermitian(n);
            let on_states = fund_w(&a, &rho)?;
            let cone = fund_w_hat(&a, &immerse(&rho))?.into_matrix();
            let lifted = cone.axpy(-cone.trace(), rho.matrix())?;
            Ok(Some(residual(Norm::Mixed, on_states.matrix(), &lifted)))
        })?);

        let cell = Cell::new(SUITE, "transitivity", tol.analytic, cfg.trials).n(n).kappa(1.0);
        cells.push(cell.run(cfg.seed, |s| {
            let (rho, sigma) = (s.density(n), s.density(n));
            let g = transitivity_element(&rho, &sigma)?;
            let reached: DensityState = act_beta(&g, &rho)?;
            Ok(Some(residual(Norm::Mixed, reached.matrix(), sigma.matrix())))
        })?);

        let cell = Cell::new(SUITE, "expectation-linearity", tol.exact, cfg.trials).n(n);
        cells.push(cell.run(cfg.seed, |s| {
            let rho = s.density(n);
            let (a, b) = (s.hermitian(n), s.hermitian(n));
            let lambda = s.normal();
            let combined = expectation(&a.axpy(lambda, &b)?, rho.matrix())?;
            let separate = expectation(&a, rho.matrix())? + lambda * expectation(&b, rho.matrix())?;
            Ok(Some(Norm::Mixed.apply((combined - separate).abs(), separate)))
        })?);
    }
    Ok(SuiteReport::new(SUITE, cfg, cells, started))
}
