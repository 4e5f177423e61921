//! Group actions on the cone and on the states, their fundamental vector
//! fields in closed form, and finite-difference flows used to cross-check
//! them.
//!
//! Directions are pairs `(a, b)` of Hermitian matrices. On `GL(H)` they
//! generate `g(t) = exp(t (a - i b)/2)`; on the cotangent group they generate
//! `(exp(-i t b/2), t a)`; unitary actions use `b` only.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::matrix::{anticomm, check_dims, comm, ComplexMatrix, HermitianMatrix, I};
use crate::spectral::{hermitian_eig, unitary_exp, SpectralDecomposition};
use crate::state::{expectation, project_to_states, tangent_project, DensityState, PositiveOperator, TangentVector};

/// Invertible matrix with smallest singular value above the invertibility
/// tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct GLElement(ComplexMatrix);

impl GLElement {
    pub fn new(g: ComplexMatrix) -> Result<Self> {
        let gram = (&g.adjoint() * &g).hermitian_part();
        let sigma_min = hermitian_eig(&gram)?.min_eigenvalue().max(0.0).sqrt();
        if !(sigma_min > Tolerances::default().invertibility) {
            return Err(Error::NotInvertible(sigma_min));
        }
        Ok(Self(g))
    }

    pub fn identity(n: usize) -> Self {
        Self(ComplexMatrix::identity(n))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self(&self.0 * &other.0))
    }

    /// `exp(t (a - i b)/2)`.
    pub fn curve(dir: &LieDirection, t: f64) -> Result<Self> {
        let gen = dir.gl_generator();
        Self::new(gen.scale_real(t).expm_general())
    }
}

/// Element `(U, a)` of the cotangent bundle of the unitary group, acting on
/// Hermitian matrices by `x -> U x U† + a`.
#[derive(Debug, Clone, PartialEq)]
pub struct CotangentElement {
    u: ComplexMatrix,
    a: HermitianMatrix,
}

impl CotangentElement {
    pub fn new(u: ComplexMatrix, a: HermitianMatrix) -> Result<Self> {
        check_dims(u.dim(), a.dim())?;
        let defect = u.unitarity_defect();
        if defect > 1e-10 {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Self { u, a })
    }

    pub fn identity(n: usize) -> Self {
        Self { u: ComplexMatrix::identity(n), a: HermitianMatrix::zeros(n) }
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn shift(&self) -> &HermitianMatrix {
        &self.a
    }

    pub fn dim(&self) -> usize {
        self.u.dim()
    }

    /// `(U, a)(V, b) = (U V, a + U b U†)`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        let shift = self.a.add(&other.a.conjugate_by(&self.u)?)?;
        Ok(Self { u: &self.u * &other.u, a: shift })
    }

    /// `(exp(-i t b/2), t a)`.
    pub fn curve(dir: &LieDirection, t: f64) -> Result<Self> {
        Ok(Self { u: unitary_exp(&dir.b, 0.5 * t)?, a: dir.a.scale(t) })
    }
}

/// The pair `(a, b)` labelling `a - i b` in the Lie algebra of `GL(H)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LieDirection {
    pub a: HermitianMatrix,
    pub b: HermitianMatrix,
}

impl LieDirection {
    pub fn new(a: HermitianMatrix, b: HermitianMatrix) -> Result<Self> {
        check_dims(a.dim(), b.dim())?;
        Ok(Self { a, b })
    }

    /// `(a, 0)`.
    pub fn dilation(a: HermitianMatrix) -> Self {
        let n = a.dim();
        Self { a, b: HermitianMatrix::zeros(n) }
    }

    /// `(0, b)`.
    pub fn rotation(b: HermitianMatrix) -> Self {
        let n = b.dim();
        Self { a: HermitianMatrix::zeros(n), b }
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// `(a - i b)/2`.
    fn gl_generator(&self) -> ComplexMatrix {
        let a = self.a.matrix();
        let b = self.b.matrix();
        ComplexMatrix::from_fn(self.dim(), |r, c| 0.5 * (a[(r, c)] - I * b[(r, c)]))
    }
}

/// Deformation exponent `kappa > 0` of `phi(x) = x^kappa`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeformationParam {
    kappa: f64,
}

impl DeformationParam {
    pub fn new(kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!("kappa must be positive, got {kappa}")));
        }
        Ok(Self { kappa })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Outside the range where the associated metric is monotone.
    pub fn warn(&self) -> bool {
        self.kappa > 1.0
    }
}

fn positive(m: HermitianMatrix) -> Result<PositiveOperator> {
    PositiveOperator::new(m)
}

/// `U x U†`.
pub fn act_alpha(u: &ComplexMatrix, x: &HermitianMatrix) -> Result<HermitianMatrix> {
    x.conjugate_by(u)
}

/// `g omega g†`.
pub fn act_beta_hat(g: &GLElement, omega: &PositiveOperator) -> Result<PositiveOperator> {
    check_dims(g.dim(), omega.dim())?;
    let m = &(g.matrix() * omega.matrix().matrix()) * &g.matrix().adjoint();
    positive(m.hermitian_part())
}

/// `g rho g† / Tr(g rho g†)`.
pub fn act_beta(g: &GLElement, rho: &DensityState) -> Result<DensityState> {
    Ok(project_to_states(&act_beta_hat(g, rho)?))
}

/// `(g omega^kappa g†)^(1/kappa)` on the cone.
pub fn act_beta_hat_phi(g: &GLElement, omega: &PositiveOperator, kappa: DeformationParam) -> Result<PositiveOperator> {
    let k = kappa.kappa();
    let lifted = positive(omega.spectral().matrix_power(k)?)?;
    let moved = act_beta_hat(g, &lifted)?;
    positive(moved.spectral().matrix_power(1.0 / k)?)
}

/// `(g rho^kappa g†)^(1/kappa)`, normalized.
pub fn act_beta_kappa(g: &GLElement, rho: &DensityState, kappa: DeformationParam) -> Result<DensityState> {
    Ok(project_to_states(&act_beta_hat_phi(g, rho, kappa)?))
}

/// `exp(U ln(omega) U† + a)`.
pub fn act_gamma_hat(e: &CotangentElement, omega: &PositiveOperator) -> Result<PositiveOperator> {
    check_dims(e.dim(), omega.dim())?;
    let log = omega.spectral().matrix_log()?;
    let moved = act_zeta(e, &log)?;
    positive(hermitian_eig(&moved)?.matrix_exp()?)
}

/// `exp(U ln(rho) U† + a/kappa)`, normalized.
pub fn act_gamma_kappa(e: &CotangentElement, rho: &DensityState, kappa: DeformationParam) -> Result<DensityState> {
    let scaled = CotangentElement { u: e.u.clone(), a: e.a.scale(1.0 / kappa.kappa()) };
    Ok(project_to_states(&act_gamma_hat(&scaled, rho)?))
}

/// `U x U† + a`.
pub fn act_zeta(e: &CotangentElement, x: &HermitianMatrix) -> Result<HermitianMatrix> {
    check_dims(e.dim(), x.dim())?;
    x.conjugate_by(&e.u)?.add(&e.a)
}

/// `g = sigma^(1/2) rho^(-1/2)`, which carries `rho` to `sigma` under the
/// undeformed action.
pub fn transitivity_element(rho: &DensityState, sigma: &DensityState) -> Result<GLElement> {
    let s = sigma.spectral().matrix_power(0.5)?;
    let r = rho.spectral().matrix_power(-0.5)?;
    GLElement::new(s.matrix() * r.matrix())
}

/// `[x, b]`, the field of conjugation by `exp(-i t b/2)`.
pub fn fund_x(b: &HermitianMatrix, x: &HermitianMatrix) -> Result<HermitianMatrix> {
    comm(x, b)
}

/// `X_b` on the cone.
pub fn fund_x_hat(b: &HermitianMatrix, omega: &PositiveOperator) -> Result<TangentVector> {
    Ok(TangentVector::cone(fund_x(b, omega.matrix())?))
}

/// `X_b` on the states; traceless.
pub fn fund_x_state(b: &HermitianMatrix, rho: &DensityState) -> Result<TangentVector> {
    TangentVector::state(fund_x(b, rho.matrix())?)
}

/// `{omega, a}`.
pub fn fund_y_hat(a: &HermitianMatrix, omega: &PositiveOperator) -> Result<TangentVector> {
    Ok(TangentVector::cone(anticomm(omega.matrix(), a)?))
}

/// `{rho, a} - rho Tr{rho, a}`.
pub fn fund_y(a: &HermitianMatrix, rho: &DensityState) -> Result<TangentVector> {
    let y = anticomm(rho.matrix(), a)?;
    let tr = y.trace();
    TangentVector::state(y.axpy(-tr, rho.matrix())?)
}

/// Field of `(g omega^kappa g†)^(1/kappa)` along `(a, 0)`. In the eigenbasis
/// of `omega`: `a_jk omega_j / kappa` on near-degenerate pairs and
/// `(1/2) a_jk (phi_j + phi_k)(omega_j - omega_k)/(phi_j - phi_k)` otherwise,
/// `phi = x^kappa`.
pub fn fund_z_phi_hat(a: &HermitianMatrix, omega: &PositiveOperator, kappa: DeformationParam) -> Result<TangentVector> {
    let k = kappa.kappa();
    let s = omega.spectral();
    let w = s.eigenvalues();
    let phi: Vec<f64> = w.iter().map(|x| x.powf(k)).collect();
    let coeff = |j: usize, l: usize| {
        if s.near_degenerate(j, l) {
            0.5 * (w[j] + w[l]) / k
        } else {
            0.5 * (phi[j] + phi[l]) * (w[j] - w[l]) / (phi[j] - phi[l])
        }
    };
    Ok(TangentVector::cone(s.entrywise(a, coeff)?))
}

/// `Z^phi_a` on the states: the traceless part of [`fund_z_phi_hat`].
pub fn fund_z_phi(a: &HermitianMatrix, rho: &DensityState, kappa: DeformationParam) -> Result<TangentVector> {
    tangent_project(fund_z_phi_hat(a, rho, kappa)?.matrix(), rho)
}

/// `d/dt exp(ln omega + t a)`: in the eigenbasis `p_j a_jj` on the diagonal
/// and `(p_j - p_k)/ln(p_j/p_k) a_jk` off it.
pub fn fund_w_hat(a: &HermitianMatrix, omega: &PositiveOperator) -> Result<TangentVector> {
    let s = omega.spectral();
    let p = s.eigenvalues();
    let coeff = |j: usize, k: usize| {
        if s.near_degenerate(j, k) {
            0.5 * (p[j] + p[k])
        } else {
            let d = (p[j] - p[k]) / p[k];
            p[k] * d / d.ln_1p()
        }
    };
    Ok(TangentVector::cone(s.entrywise(a, coeff)?))
}

/// `W_a = W-hat_a - Tr(rho a) rho`.
pub fn fund_w(a: &HermitianMatrix, rho: &DensityState) -> Result<TangentVector> {
    let w = fund_w_hat(a, rho)?;
    let l = expectation(a, rho.matrix())?;
    TangentVector::state(w.matrix().axpy(-l, rho.matrix())?)
}

/// `W^phi_a = W_a / kappa`.
pub fn fund_w_phi(a: &HermitianMatrix, rho: &DensityState, kappa: DeformationParam) -> Result<TangentVector> {
    TangentVector::state(fund_w(a, rho)?.matrix().scale(1.0 / kappa.kappa()))
}

/// The named actions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Action {
    Alpha,
    BetaHat,
    Beta,
    BetaKappa(DeformationParam),
    GammaHat,
    GammaKappa(DeformationParam),
    Zeta,
}

/// Which space an action moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Cone,
    States,
    Hermitian,
}

/// A point acted on.
#[derive(Debug, Clone, PartialEq)]
pub enum Point {
    Cone(PositiveOperator),
    State(DensityState),
    Hermitian(HermitianMatrix),
}

impl Point {
    pub fn matrix(&self) -> &HermitianMatrix {
        match self {
            Self::Cone(w) => w.matrix(),
            Self::State(r) => r.matrix(),
            Self::Hermitian(x) => x,
        }
    }
}

/// A group element of the kind an action expects.
#[derive(Debug, Clone, PartialEq)]
pub enum GroupElement {
    Gl(GLElement),
    Cotangent(CotangentElement),
}

impl GroupElement {
    pub fn compose(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (Self::Gl(g), Self::Gl(h)) => Ok(Self::Gl(g.compose(h)?)),
            (Self::Cotangent(g), Self::Cotangent(h)) => Ok(Self::Cotangent(g.compose(h)?)),
            _ => Err(Error::InvalidParameter("cannot compose elements of different groups".into())),
        }
    }
}

impl Action {
    /// Parses a CLI action name; `kappa` is required by the deformed ones.
    pub fn from_name(name: &str, kappa: Option<f64>) -> Result<Self> {
        let need = || -> Result<DeformationParam> {
            DeformationParam::new(kappa.ok_or_else(|| Error::Parse(format!("action '{name}' needs --kappa")))?)
        };
        match name {
            "alpha" => Ok(Self::Alpha),
            "beta-hat" => Ok(Self::BetaHat),
            "beta" => Ok(Self::Beta),
            "beta-kappa" => Ok(Self::BetaKappa(need()?)),
            "gamma-hat" => Ok(Self::GammaHat),
            "gamma-kappa" => Ok(Self::GammaKappa(need()?)),
            "zeta" => Ok(Self::Zeta),
            other => Err(Error::Parse(format!("unknown action '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Alpha => "alpha",
            Self::BetaHat => "beta-hat",
            Self::Beta => "beta",
            Self::BetaKappa(_) => "beta-kappa",
            Self::GammaHat => "gamma-hat",
            Self::GammaKappa(_) => "gamma-kappa",
            Self::Zeta => "zeta",
        }
    }

    pub fn space(&self) -> Space {
        match self {
            Self::BetaHat | Self::GammaHat => Space::Cone,
            Self::Alpha | Self::Beta | Self::BetaKappa(_) | Self::GammaKappa(_) => Space::States,
            Self::Zeta => Space::Hermitian,
        }
    }

    fn uses_gl(&self) -> bool {
        matches!(self, Self::BetaHat | Self::Beta | Self::BetaKappa(_))
    }

    pub fn identity(&self, n: usize) -> GroupElement {
        if self.uses_gl() || matches!(self, Self::Alpha) {
            GroupElement::Gl(GLElement::identity(n))
        } else {
            GroupElement::Cotangent(CotangentElement::identity(n))
        }
    }

    /// Group element at time `t` on the curve generated by `dir`.
    pub fn curve(&self, dir: &LieDirection, t: f64) -> Result<GroupElement> {
        match self {
            Self::Alpha => Ok(GroupElement::Gl(GLElement::new(unitary_exp(&dir.b, 0.5 * t)?)?)),
            _ if self.uses_gl() => Ok(GroupElement::Gl(GLElement::curve(dir, t)?)),
            _ => Ok(GroupElement::Cotangent(CotangentElement::curve(dir, t)?)),
        }
    }

    pub fn apply(&self, g: &GroupElement, x: &Point) -> Result<Point> {
        let mismatch = || Error::InvalidParameter(format!("action '{}' does not accept this element or point", self.name()));
        match (self, g, x) {
            (Self::Alpha, GroupElement::Gl(u), Point::State(r)) => {
                let defect = u.matrix().unitarity_defect();
                if defect > 1e-10 {
                    return Err(Error::NotUnitary(defect));
                }
                Ok(Point::State(project_to_states(&positive(act_alpha(u.matrix(), r.matrix())?)?)))
            }
            (Self::BetaHat, GroupElement::Gl(g), Point::Cone(w)) => Ok(Point::Cone(act_beta_hat(g, w)?)),
            (Self::Beta, GroupElement::Gl(g), Point::State(r)) => Ok(Point::State(act_beta(g, r)?)),
            (Self::BetaKappa(k), GroupElement::Gl(g), Point::State(r)) => Ok(Point::State(act_beta_kappa(g, r, *k)?)),
            (Self::GammaHat, GroupElement::Cotangent(e), Point::Cone(w)) => Ok(Point::Cone(act_gamma_hat(e, w)?)),
            (Self::GammaKappa(k), GroupElement::Cotangent(e), Point::State(r)) => {
                Ok(Point::State(act_gamma_kappa(e, r, *k)?))
            }
            (Self::Zeta, GroupElement::Cotangent(e), Point::Hermitian(h)) => Ok(Point::Hermitian(act_zeta(e, h)?)),
            _ => Err(mismatch()),
        }
    }

    /// Closed-form fundamental field along `dir` at `x`.
    pub fn fundamental_field(&self, dir: &LieDirection, x: &Point) -> Result<HermitianMatrix> {
        let mismatch = || Error::InvalidParameter(format!("action '{}' does not accept this point", self.name()));
        let (a, b) = (&dir.a, &dir.b);
        let rotation = fund_x(b, x.matrix())?;
        let dilation = match (self, x) {
            (Self::Alpha, Point::State(_)) => HermitianMatrix::zeros(dir.dim()),
            (Self::BetaHat, Point::Cone(w)) => fund_y_hat(a, w)?.into_matrix(),
            (Self::Beta, Point::State(r)) => fund_y(a, r)?.into_matrix(),
            (Self::BetaKappa(k), Point::State(r)) => fund_z_phi(a, r, *k)?.into_matrix(),
            (Self::GammaHat, Point::Cone(w)) => fund_w_hat(a, w)?.into_matrix(),
            (Self::GammaKappa(k), Point::State(r)) => fund_w_phi(a, r, *k)?.into_matrix(),
            (Self::Zeta, Point::Hermitian(_)) => a.clone(),
            _ => return Err(mismatch()),
        };
        rotation.add(&dilation)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::BetaKappa(k) | Self::GammaKappa(k) => write!(f, "{}(kappa={})", self.name(), k.kappa()),
            _ => f.write_str(self.name()),
        }
    }
}

/// Central difference `(x(h) - x(-h))/(2h)` of `t -> act(curve(t), x)`;
/// with `richardson` the estimate `(4 D(h/2) - D(h))/3`.
pub fn flow_fundamental_numeric(
    action: &Action,
    dir: &LieDirection,
    x: &Point,
    h: f64,
    richardson: bool,
) -> Result<HermitianMatrix> {
    if !(1e-7..=1e-3).contains(&h) {
        return Err(Error::InvalidParameter(format!("finite-difference step must lie in [1e-7, 1e-3], got {h}")));
    }
    let central = |h: f64| -> Result<HermitianMatrix> {
        let plus = action.apply(&action.curve(dir, h)?, x)?;
        let minus = action.apply(&action.curve(dir, -h)?, x)?;
        Ok(plus.matrix().sub(minus.matrix())?.scale(0.5 / h))
    };
    let d = central(h)?;
    if !richardson {
        return Ok(d);
    }
    let half = central(0.5 * h)?;
    half.scale(4.0 / 3.0).axpy(-1.0 / 3.0, &d)
}

/// `T(phi^-1)` applied to `Y-hat_a` at `phi(omega)`: the Schur product of
/// the divided differences of `x^(1/kappa)` on the spectrum of
/// `omega^kappa` with `{omega^kappa, a}`.
pub fn phi_related_y_hat(a: &HermitianMatrix, omega: &PositiveOperator, kappa: DeformationParam) -> Result<HermitianMatrix> {
    let k = kappa.kappa();
    let lifted = PositiveOperator::new(omega.spectral().matrix_power(k)?)?;
    let y = anticomm(lifted.matrix(), a)?;
    let s: &SpectralDecomposition = lifted.spectral();
    let table = s.first_divided_difference(|x| x.powf(1.0 / k), |x| x.powf(1.0 / k - 1.0) / k)?;
    s.schur_product(&table, &y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::Sampler;
    use num_complex::Complex64;

    fn kappa(k: f64) -> DeformationParam {
        DeformationParam::new(k).unwrap()
    }

    fn diag_pos(p: &[f64]) -> PositiveOperator {
        PositiveOperator::new(HermitianMatrix::diag(p)).unwrap()
    }

    #[test]
    fn beta_hat_examples() {
        let mut s = Sampler::new(1);
        let w = s.positive(3);
        let u = s.unitary(3);
        let moved = act_beta_hat(&GLElement::new(u.clone()).unwrap(), &w).unwrap();
        assert!(moved.matrix().distance(&act_alpha(&u, w.matrix()).unwrap()) < 1e-14);
        let two = GLElement::new(ComplexMatrix::identity(3).scale_real(2.0)).unwrap();
        assert!(act_beta_hat(&two, &w).unwrap().matrix().distance(&w.matrix().scale(4.0)) < 1e-14);
        let g = GLElement::new(ComplexMatrix::from_real_diagonal(&[2.0, 1.0])).unwrap();
        let half = DensityState::maximally_mixed(2);
        assert!(act_beta_hat(&g, &half).unwrap().matrix().distance(&HermitianMatrix::diag(&[2.0, 0.5])) < 1e-16);
    }

    #[test]
    fn beta_kappa_examples() {
        let mut s = Sampler::new(2);
        let rho = s.density(3);
        let u = GLElement::new(s.unitary(3)).unwrap();
        let scalar = GLElement::new(ComplexMatrix::identity(3).scale_real(3.7)).unwrap();
        for k in [0.3, 0.5, 1.0, 1.5] {
            let out = act_beta_kappa(&u, &rho, kappa(k)).unwrap();
            assert!(out.matrix().distance(&act_alpha(u.matrix(), rho.matrix()).unwrap()) < 1e-13);
            assert!(act_beta_kappa(&scalar, &rho, kappa(k)).unwrap().matrix().distance(rho.matrix()) < 1e-14);
        }
        let g = GLElement::new(ComplexMatrix::from_real_diagonal(&[2.0, 1.0])).unwrap();
        let out = act_beta_kappa(&g, &DensityState::maximally_mixed(2), kappa(1.0)).unwrap();
        assert!(out.matrix().distance(&HermitianMatrix::diag(&[0.8, 0.2])) < 1e-15);
    }

    #[test]
    fn gamma_examples() {
        let mut s = Sampler::new(3);
        let w = s.positive(3);
        assert!(act_gamma_hat(&CotangentElement::identity(3), &w).unwrap().matrix().distance(w.matrix()) < 1e-13);
        let u = s.unitary(3);
        let e = CotangentElement::new(u.clone(), HermitianMatrix::zeros(3)).unwrap();
        let expected = act_alpha(&u, w.matrix()).unwrap();
        assert!(act_gamma_hat(&e, &w).unwrap().matrix().distance(&expected) < 1e-13);
        let shift = CotangentElement::new(ComplexMatrix::identity(2), HermitianMatrix::diag(&[2f64.ln(), 0.0])).unwrap();
        let out = act_gamma_hat(&shift, &PositiveOperator::new(HermitianMatrix::identity(2)).unwrap()).unwrap();
        assert!(out.matrix().distance(&HermitianMatrix::diag(&[2.0, 1.0])) < 1e-15);
        let out = act_gamma_kappa(&shift, &DensityState::maximally_mixed(2), kappa(1.0)).unwrap();
        assert!(out.matrix().distance(&HermitianMatrix::diag(&[2.0 / 3.0, 1.0 / 3.0])) < 1e-15);
        let rho = s.density(2);
        let a = s.hermitian(2);
        let e2 = CotangentElement::new(ComplexMatrix::identity(2), a.clone()).unwrap();
        let e1 = CotangentElement::new(ComplexMatrix::identity(2), a.scale(0.5)).unwrap();
        let lhs = act_gamma_kappa(&e2, &rho, kappa(2.0)).unwrap();
        let rhs = act_gamma_kappa(&e1, &rho, kappa(1.0)).unwrap();
        assert!(lhs.matrix().distance(rhs.matrix()) < 1e-15);
        assert!(act_gamma_kappa(&CotangentElement::identity(2), &rho, kappa(0.4)).unwrap().matrix().distance(rho.matrix()) < 1e-14);
    }

    #[test]
    fn zeta_examples() {
        let mut s = Sampler::new(4);
        let (x, a) = (s.hermitian(3), s.hermitian(3));
        let shift = CotangentElement::new(ComplexMatrix::identity(3), a.clone()).unwrap();
        assert!(act_zeta(&shift, &x).unwrap().distance(&x.add(&a).unwrap()) < 1e-15);
        let u = s.unitary(3);
        let rot = CotangentElement::new(u.clone(), HermitianMatrix::zeros(3)).unwrap();
        assert!(act_zeta(&rot, &x).unwrap().distance(&x.conjugate_by(&u).unwrap()) < 1e-15);
    }

    #[test]
    fn fund_x_examples() {
        let mut s = Sampler::new(5);
        let b = s.hermitian(3);
        let mixed = DensityState::maximally_mixed(3);
        assert!(fund_x_state(&b, &mixed).unwrap().matrix().frobenius_norm() < 1e-16);
        let rho = DensityState::new(HermitianMatrix::diag(&[0.2, 0.3, 0.5])).unwrap();
        let bd = HermitianMatrix::diag(&[1.0, -2.0, 0.5]);
        assert_eq!(fund_x_state(&bd, &rho).unwrap().matrix().frobenius_norm(), 0.0);
        let rho = DensityState::new(HermitianMatrix::diag(&[0.75, 0.25])).unwrap();
        let x = fund_x_state(&HermitianMatrix::pauli_x(), &rho).unwrap();
        let expected = ComplexMatrix::from_rows(&[
            vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.25)],
            vec![Complex64::new(0.0, -0.25), Complex64::new(0.0, 0.0)],
        ])
        .unwrap();
        assert!((x.matrix().matrix() - &expected).max_abs() < 1e-16);
    }

    #[test]
    fn fund_y_examples() {
        let w = diag_pos(&[1.0, 3.0]);
        assert!(fund_y_hat(&HermitianMatrix::identity(2), &w).unwrap().matrix().distance(w.matrix()) < 1e-16);
        let rho = Sampler::new(6).density(3);
        assert!(fund_y(&HermitianMatrix::identity(3), &rho).unwrap().matrix().frobenius_norm() < 1e-15);
        let half = DensityState::maximally_mixed(2);
        let y = fund_y(&HermitianMatrix::pauli_z(), &half).unwrap();
        assert!(y.matrix().distance(&HermitianMatrix::pauli_z().scale(0.5)) < 1e-16);
    }

    #[test]
    fn fund_z_examples() {
        let w = diag_pos(&[1.0, 2.0]);
        let z = fund_z_phi_hat(&HermitianMatrix::pauli_x(), &w, kappa(1.0)).unwrap();
        assert!(z.matrix().distance(&HermitianMatrix::pauli_x().scale(1.5)) < 1e-15);
        let z = fund_z_phi_hat(&HermitianMatrix::identity(2), &w, kappa(0.5)).unwrap();
        assert!(z.matrix().distance(&HermitianMatrix::diag(&[2.0, 4.0])) < 1e-15);
        let one = PositiveOperator::new(HermitianMatrix::identity(2)).unwrap();
        let a = HermitianMatrix::diag(&[0.7, -1.3]);
        for k in [0.25, 0.5, 2.0] {
            let z = fund_z_phi_hat(&a, &one, kappa(k)).unwrap();
            assert!(z.matrix().distance(&a.scale(1.0 / k)) < 1e-15);
        }
    }

    #[test]
    fn fund_w_examples() {
        let w = diag_pos(&[1.0, 3.0]);
        assert!(fund_w_hat(&HermitianMatrix::identity(2), &w).unwrap().matrix().distance(w.matrix()) < 1e-15);
        let e = std::f64::consts::E;
        let w = diag_pos(&[1.0, e]);
        let out = fund_w_hat(&HermitianMatrix::pauli_x(), &w).unwrap();
        assert!(out.matrix().distance(&HermitianMatrix::pauli_x().scale(e - 1.0)) < 1e-15);
        let half = DensityState::maximally_mixed(2);
        let out = fund_w(&HermitianMatrix::pauli_z(), &half).unwrap();
        assert!(out.matrix().distance(&HermitianMatrix::pauli_z().scale(0.5)) < 1e-16);
    }

    #[test]
    fn w_hat_matches_dexp_of_log() {
        let mut s = Sampler::new(7);
        for n in 2..6 {
            let w = s.positive(n);
            let a = s.hermitian(n);
            let closed = fund_w_hat(&a, &w).unwrap().into_matrix();
            let log = w.spectral().matrix_log().unwrap();
            let via_dexp = crate::spectral::dexp_directional(&log, &a).unwrap();
            assert!(closed.distance(&via_dexp) <= 1e-12 * closed.frobenius_norm());
        }
    }

    #[test]
    fn z_at_kappa_one_is_y_hat() {
        let mut s = Sampler::new(8);
        for n in 2..6 {
            let w = s.positive(n);
            let a = s.hermitian(n);
            let z = fund_z_phi_hat(&a, &w, kappa(1.0)).unwrap();
            let y = fund_y_hat(&a, &w).unwrap();
            assert!(z.matrix().distance(y.matrix()) <= 1e-13 * y.matrix().frobenius_norm());
        }
    }

    #[test]
    fn numeric_flows_match_closed_forms() {
        let mut s = Sampler::new(9);
        let n = 3;
        let w = s.positive(n);
        let rho = s.density(n);
        let (a, b) = (s.hermitian(n), s.hermitian(n));
        let rot = LieDirection::rotation(b.clone());
        let dil = LieDirection::dilation(a.clone());
        let both = LieDirection::new(a.clone(), b.clone()).unwrap();
        let rel = |x: &HermitianMatrix, y: &HermitianMatrix| x.distance(y) / y.frobenius_norm();
        let cone = Point::Cone(w.clone());
        let fd = flow_fundamental_numeric(&Action::BetaHat, &rot, &cone, 1e-5, false).unwrap();
        assert!(rel(&fd, fund_x_hat(&b, &w).unwrap().matrix()) < 1e-7);
        let fd = flow_fundamental_numeric(&Action::BetaHat, &dil, &cone, 1e-5, false).unwrap();
        assert!(rel(&fd, fund_y_hat(&a, &w).unwrap().matrix()) < 1e-7);
        let state = Point::State(rho.clone());
        for k in [0.3, 1.0, 1.7] {
            let act = Action::GammaKappa(kappa(k));
            let fd = flow_fundamental_numeric(&act, &dil, &state, 1e-5, false).unwrap();
            assert!(rel(&fd, fund_w_phi(&a, &rho, kappa(k)).unwrap().matrix()) < 1e-6);
        }
        for act in [
            Action::Alpha,
            Action::Beta,
            Action::BetaKappa(kappa(0.4)),
            Action::GammaKappa(kappa(0.6)),
        ] {
            let fd = flow_fundamental_numeric(&act, &both, &state, 1e-5, true).unwrap();
            let exact = act.fundamental_field(&both, &state).unwrap();
            assert!(rel(&fd, &exact) < 1e-8, "{act}");
        }
        for (act, p) in [(Action::GammaHat, cone.clone()), (Action::Zeta, Point::Hermitian(a.clone()))] {
            let fd = flow_fundamental_numeric(&act, &both, &p, 1e-5, true).unwrap();
            let exact = act.fundamental_field(&both, &p).unwrap();
            assert!(rel(&fd, &exact) < 1e-8, "{act}");
        }
        assert!(flow_fundamental_numeric(&Action::Beta, &both, &state, 1e-2, false).is_err());
    }

    #[test]
    fn phi_relatedness() {
        let mut s = Sampler::new(10);
        for n in 2..5 {
            let w = s.positive(n);
            let a = s.hermitian(n);
            for k in [0.25, 0.5, 0.75, 1.3] {
                let z = fund_z_phi_hat(&a, &w, kappa(k)).unwrap();
                let related = phi_related_y_hat(&a, &w, kappa(k)).unwrap();
                assert!(z.matrix().distance(&related) <= 1e-9 * z.matrix().frobenius_norm());
            }
        }
    }

    #[test]
    fn transitivity_at_kappa_one() {
        let mut s = Sampler::new(11);
        let (rho, sigma) = (s.density(3), s.density(3));
        let g = transitivity_element(&rho, &sigma).unwrap();
        assert!(act_beta(&g, &rho).unwrap().matrix().distance(sigma.matrix()) < 1e-12);
    }

    #[test]
    fn rejects_bad_elements() {
        assert!(matches!(GLElement::new(ComplexMatrix::zeros(2)), Err(Error::NotInvertible(_))));
        let not_unitary = ComplexMatrix::identity(2).scale_real(1.1);
        assert!(matches!(CotangentElement::new(not_unitary, HermitianMatrix::zeros(2)), Err(Error::NotUnitary(_))));
        assert!(DeformationParam::new(0.0).is_err());
        assert!(DeformationParam::new(1.5).unwrap().warn());
        assert!(Action::from_name("beta-kappa", None).is_err());
        assert!(Action::from_name("nope", Some(1.0)).is_err());
    }
}
