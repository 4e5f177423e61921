use num_complex::Complex64;
use proptest::prelude::*;
use qmetric_core::actions::{
    act_alpha, act_beta, act_beta_hat, act_beta_kappa, act_gamma_hat, act_gamma_kappa, act_zeta, flow_fundamental_numeric,
    fund_w_phi, fund_x, fund_y_hat, fund_z_phi_hat, phi_related_y_hat, Action, CotangentElement, DeformationParam,
    GLElement, GroupElement, LieDirection, Point,
};
use qmetric_core::matrix::{ComplexMatrix, HermitianMatrix};
use qmetric_core::random::Sampler;
use qmetric_core::spectral::hermitian_eig;
use qmetric_core::state::{expectation, immerse, project_to_states, PositiveOperator};

fn kappa(k: f64) -> DeformationParam {
    DeformationParam::new(k).unwrap()
}

fn cotangent(s: &mut Sampler, n: usize) -> CotangentElement {
    let a = s.hermitian(n);
    CotangentElement::new(s.unitary(n), a.scale(0.3 / a.frobenius_norm())).unwrap()
}

fn rel(x: &HermitianMatrix, y: &HermitianMatrix) -> f64 {
    x.distance(y) / y.frobenius_norm().max(1.0)
}

/// `x^t` through `exp(t log x)`, avoiding `matrix_power`.
fn power_via_log(x: &HermitianMatrix, t: f64) -> HermitianMatrix {
    let log = hermitian_eig(x).unwrap().matrix_log().unwrap();
    hermitian_eig(&log.scale(t)).unwrap().matrix_exp().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_inverts_immersion(seed in any::<u64>(), n in 2usize..=5) {
        let rho = Sampler::new(seed).density(n);
        let back = project_to_states(&immerse(&rho));
        prop_assert!(back.matrix().distance(rho.matrix()) <= 1e-15);
    }

    #[test]
    fn beta_is_the_normalized_cone_action(seed in any::<u64>(), n in 2usize..=5) {
        let mut s = Sampler::new(seed);
        let rho = s.density(n);
        let g = GLElement::new(s.gl_element(n)).unwrap();
        let m = &(g.matrix() * rho.matrix().matrix()) * &g.matrix().adjoint();
        let expected = m.scale(Complex64::new(1.0, 0.0) / m.trace()).hermitian_part();
        prop_assert!(rel(act_beta(&g, &rho).unwrap().matrix(), &expected) <= 1e-12);
        let via_cone = project_to_states(&act_beta_hat(&g, &immerse(&rho)).unwrap());
        prop_assert!(rel(via_cone.matrix(), &expected) <= 1e-12);
    }

    #[test]
    fn expectation_is_linear(seed in any::<u64>(), n in 2usize..=5, alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
        let mut s = Sampler::new(seed);
        let rho = s.density(n);
        let (a, b) = (s.hermitian(n), s.hermitian(n));
        let combined = expectation(&a.scale(alpha).axpy(beta, &b).unwrap(), rho.matrix()).unwrap();
        let separate = alpha * expectation(&a, rho.matrix()).unwrap() + beta * expectation(&b, rho.matrix()).unwrap();
        prop_assert!((combined - separate).abs() <= 1e-12 * (1.0 + separate.abs()));
    }

    #[test]
    fn axioms_hold_for_every_action(seed in any::<u64>(), n in 2usize..=4, k in 0.1f64..2.0) {
        let mut s = Sampler::new(seed);
        let actions = [
            Action::Alpha, Action::BetaHat, Action::Beta, Action::BetaKappa(kappa(k)),
            Action::GammaHat, Action::GammaKappa(kappa(k)), Action::Zeta,
        ];
        for action in actions {
            let element = |s: &mut Sampler| match action {
                Action::Alpha => GroupElement::Gl(GLElement::new(s.unitary(n)).unwrap()),
                Action::BetaHat | Action::Beta | Action::BetaKappa(_) => GroupElement::Gl(GLElement::new(s.gl_element(n)).unwrap()),
                _ => GroupElement::Cotangent(cotangent(s, n)),
            };
            let x = match action {
                Action::BetaHat | Action::GammaHat => Point::Cone(s.positive(n)),
                Action::Zeta => Point::Hermitian(s.hermitian(n)),
                _ => Point::State(s.density(n)),
            };
            let (g, h) = (element(&mut s), element(&mut s));
            let same = action.apply(&action.identity(n), &x).unwrap();
            prop_assert!(rel(same.matrix(), x.matrix()) <= 1e-12, "{action} identity");
            let stepwise = action.apply(&g, &action.apply(&h, &x).unwrap()).unwrap();
            let composed = action.apply(&g.compose(&h).unwrap(), &x).unwrap();
            prop_assert!(rel(stepwise.matrix(), composed.matrix()) <= 1e-10, "{action} composition");
        }
    }

    #[test]
    fn deformed_actions_restrict_to_conjugation(seed in any::<u64>(), n in 2usize..=4, k in prop::sample::select(vec![0.3, 0.5, 1.0, 1.7])) {
        let mut s = Sampler::new(seed);
        let rho = s.density(n);
        let u = s.unitary(n);
        let conjugated = act_alpha(&u, rho.matrix()).unwrap();
        let beta = act_beta_kappa(&GLElement::new(u.clone()).unwrap(), &rho, kappa(k)).unwrap();
        prop_assert!(rel(beta.matrix(), &conjugated) <= 1e-10);
        let e = CotangentElement::new(u, HermitianMatrix::zeros(n)).unwrap();
        let gamma = act_gamma_kappa(&e, &rho, kappa(k)).unwrap();
        prop_assert!(rel(gamma.matrix(), &conjugated) <= 1e-10);
    }

    #[test]
    fn beta_kappa_is_conjugate_to_the_linear_action(seed in any::<u64>(), n in 2usize..=4, k in 0.1f64..2.0) {
        let mut s = Sampler::new(seed);
        let rho = s.density(n);
        let g = GLElement::new(s.gl_element(n)).unwrap();
        let lifted = PositiveOperator::new(power_via_log(rho.matrix(), k)).unwrap();
        let moved = act_beta_hat(&g, &lifted).unwrap();
        let back = power_via_log(moved.matrix(), 1.0 / k);
        let expected = back.scale(1.0 / back.trace());
        prop_assert!(rel(act_beta_kappa(&g, &rho, kappa(k)).unwrap().matrix(), &expected) <= 1e-10);
    }

    #[test]
    fn gamma_hat_is_zeta_conjugated_by_log(seed in any::<u64>(), n in 2usize..=4) {
        let mut s = Sampler::new(seed);
        let omega = s.positive(n);
        let e = cotangent(&mut s, n);
        let log = omega.spectral().matrix_log().unwrap();
        let affine = act_zeta(&e, &log).unwrap();
        let expected = affine.matrix().expm_general().hermitian_part();
        prop_assert!(rel(act_gamma_hat(&e, &omega).unwrap().matrix(), &expected) <= 1e-10);
    }

    #[test]
    fn z_phi_hat_is_phi_related_to_y_hat(seed in any::<u64>(), n in 2usize..=4, k in 0.1f64..2.0) {
        let mut s = Sampler::new(seed);
        let omega = s.positive(n);
        let a = s.hermitian(n);
        let z = fund_z_phi_hat(&a, &omega, kappa(k)).unwrap();
        let pulled = phi_related_y_hat(&a, &omega, kappa(k)).unwrap();
        prop_assert!(pulled.distance(z.matrix()) <= 1e-9 * z.matrix().frobenius_norm());
    }

    #[test]
    fn cone_flows_match_closed_forms(seed in any::<u64>(), n in 2usize..=4) {
        let mut s = Sampler::new(seed);
        let omega = s.positive(n);
        let (a, b) = (s.hermitian(n), s.hermitian(n));
        let x = Point::Cone(omega.clone());
        let rot = flow_fundamental_numeric(&Action::BetaHat, &LieDirection::rotation(b.clone()), &x, 1e-5, false).unwrap();
        let exact = fund_x(&b, omega.matrix()).unwrap();
        prop_assert!(rot.distance(&exact) <= 1e-7 * exact.frobenius_norm().max(1.0));
        let dil = flow_fundamental_numeric(&Action::BetaHat, &LieDirection::dilation(a.clone()), &x, 1e-5, false).unwrap();
        let exact = fund_y_hat(&a, &omega).unwrap().into_matrix();
        prop_assert!(dil.distance(&exact) <= 1e-7 * exact.frobenius_norm().max(1.0));
    }

    #[test]
    fn gamma_kappa_flow_matches_w_phi(seed in any::<u64>(), n in 2usize..=4, k in 0.25f64..2.0) {
        let mut s = Sampler::new(seed);
        let rho = s.density(n);
        let a = s.hermitian(n);
        let x = Point::State(rho.clone());
        let fd = flow_fundamental_numeric(&Action::GammaKappa(kappa(k)), &LieDirection::dilation(a.clone()), &x, 1e-5, false).unwrap();
        let exact = fund_w_phi(&a, &rho, kappa(k)).unwrap().into_matrix();
        prop_assert!(fd.distance(&exact) <= 1e-6 * exact.frobenius_norm());
    }
}

#[test]
fn cotangent_composition_is_semidirect() {
    let mut s = Sampler::new(11);
    let (g, h) = (cotangent(&mut s, 3), cotangent(&mut s, 3));
    let gh = g.compose(&h).unwrap();
    let uv: ComplexMatrix = g.unitary() * h.unitary();
    assert!((gh.unitary() - &uv).max_abs() < 1e-15);
    let shift = g.shift().add(&h.shift().conjugate_by(g.unitary()).unwrap()).unwrap();
    assert!(gh.shift().distance(&shift) < 1e-15);
}
