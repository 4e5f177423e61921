//! The Petz superoperator `K^f` as an eigenbasis coefficient table, the
//! metric `G(v, w) = kappa Tr(v K^-1(w))`, gradients of expectation value
//! functions, and the classical Fisher-Rao metric.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{check_dims, HermitianMatrix};
use crate::monotone::MonotoneFunctionSpec;
use crate::spectral::{SpectralDecomposition, Table};
use crate::state::{tangent_project, DensityState, PositiveOperator, TangentKind, TangentVector};

/// `K^f` at a base point: eigenbasis entry `(j, k)` is multiplied by
/// `c_jk = p_k f(p_j/p_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PetzSuperoperator {
    spectral: SpectralDecomposition,
    coeffs: Table,
    spec: MonotoneFunctionSpec,
}

impl PetzSuperoperator {
    pub fn build(x: &PositiveOperator, spec: &MonotoneFunctionSpec) -> Result<Self> {
        let spectral = x.spectral().clone();
        let p = spectral.eigenvalues();
        let n = p.len();
        let mut coeffs = vec![vec![0.0; n]; n];
        for j in 0..n {
            for k in j..n {
                let c = p[k] * spec.eval(p[j] / p[k])?;
                if !(c > 0.0 && c.is_finite()) {
                    return Err(Error::NotPositive { eigenvalue: c, floor: 0.0 });
                }
                coeffs[j][k] = c;
                coeffs[k][j] = c;
            }
        }
        Ok(Self { spectral, coeffs, spec: *spec })
    }

    pub fn coeffs(&self) -> &Table {
        &self.coeffs
    }

    pub fn spectral(&self) -> &SpectralDecomposition {
        &self.spectral
    }

    pub fn spec(&self) -> &MonotoneFunctionSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spectral.dim()
    }

    pub fn apply(&self, a: &HermitianMatrix) -> Result<HermitianMatrix> {
        self.spectral.entrywise(a, |j, k| self.coeffs[j][k])
    }

    pub fn apply_inverse(&self, a: &HermitianMatrix) -> Result<HermitianMatrix> {
        self.spectral.entrywise(a, |j, k| 1.0 / self.coeffs[j][k])
    }

    /// `Tr(v K^-1(w)) = sum_jk conj(v_jk) w_jk / c_jk` in the eigenbasis.
    pub fn inverse_pairing(&self, v: &HermitianMatrix, w: &HermitianMatrix) -> Result<f64> {
        check_dims(self.dim(), v.dim())?;
        check_dims(self.dim(), w.dim())?;
        let vb = self.spectral.to_eigenbasis(v.matrix())?;
        let wb = self.spectral.to_eigenbasis(w.matrix())?;
        let n = self.dim();
        let mut total = 0.0;
        for j in 0..n {
            for k in 0..n {
                total += (vb[(j, k)].conj() * wb[(j, k)]).re / self.coeffs[j][k];
            }
        }
        Ok(total)
    }
}

pub fn build_k(x: &PositiveOperator, spec: &MonotoneFunctionSpec) -> Result<PetzSuperoperator> {
    PetzSuperoperator::build(x, spec)
}

pub fn apply_k(k: &PetzSuperoperator, a: &HermitianMatrix) -> Result<HermitianMatrix> {
    k.apply(a)
}

pub fn apply_k_inverse(k: &PetzSuperoperator, a: &HermitianMatrix) -> Result<HermitianMatrix> {
    k.apply_inverse(a)
}

/// A Petz function together with the overall constant in front of the
/// metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSpec {
    pub function: MonotoneFunctionSpec,
    pub prefactor: f64,
}

impl MetricSpec {
    pub fn new(function: MonotoneFunctionSpec, prefactor: f64) -> Result<Self> {
        if !(prefactor > 0.0 && prefactor.is_finite()) {
            return Err(Error::InvalidParameter(format!("metric prefactor must be positive, got {prefactor}")));
        }
        Ok(Self { function, prefactor })
    }

    pub fn unit(function: MonotoneFunctionSpec) -> Self {
        Self { function, prefactor: 1.0 }
    }
}

/// Metric on the states; both tangents must be traceless.
pub fn metric_eval(m: &MetricSpec, rho: &DensityState, v: &TangentVector, w: &TangentVector) -> Result<f64> {
    for t in [v, w] {
        if t.kind() != TangentKind::StateSpace {
            return Err(Error::InvalidParameter("state metric needs state-space tangent vectors".into()));
        }
    }
    metric_eval_cone(m, rho.as_positive(), v.matrix(), w.matrix())
}

/// The same coefficient table on the cone, for arbitrary Hermitian tangents.
pub fn metric_eval_cone(m: &MetricSpec, omega: &PositiveOperator, v: &HermitianMatrix, w: &HermitianMatrix) -> Result<f64> {
    let k = PetzSuperoperator::build(omega, &m.function)?;
    Ok(m.prefactor * k.inverse_pairing(v, w)?)
}

/// `grad l_a = (K(a) - Tr(K(a)) rho) / prefactor`.
pub fn gradient_field(m: &MetricSpec, a: &HermitianMatrix, rho: &DensityState) -> Result<TangentVector> {
    let k = PetzSuperoperator::build(rho.as_positive(), &m.function)?;
    gradient_with(&k, m.prefactor, a, rho)
}

/// [`gradient_field`] reusing an already built superoperator at `rho`.
pub fn gradient_with(k: &PetzSuperoperator, prefactor: f64, a: &HermitianMatrix, rho: &DensityState) -> Result<TangentVector> {
    let ka = k.apply(a)?.scale(1.0 / prefactor);
    tangent_project(&ka, rho)
}

/// Gradient on the cone: `K(a) / prefactor`.
pub fn gradient_field_cone(m: &MetricSpec, a: &HermitianMatrix, omega: &PositiveOperator) -> Result<TangentVector> {
    let k = PetzSuperoperator::build(omega, &m.function)?;
    Ok(TangentVector::cone(k.apply(a)?.scale(1.0 / m.prefactor)))
}

/// Classical Fisher-Rao metric `sum_j u_j v_j / p_j`.
pub fn fisher_rao_eval(p: &[f64], u: &[f64], v: &[f64]) -> Result<f64> {
    check_dims(p.len(), u.len())?;
    check_dims(p.len(), v.len())?;
    if let Some(&bad) = p.iter().find(|&&x| !(x > 0.0)) {
        return Err(Error::Domain(bad));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized(total));
    }
    Ok(p.iter().zip(u).zip(v).map(|((p, u), v)| u * v / p).sum())
}
