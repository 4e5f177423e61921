//! Invertible positive operators, faithful states, tangent vectors and the
//! maps between the cone and the trace-one slice.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::matrix::{anticomm, check_dims, ComplexMatrix, HermitianMatrix, MatrixJson};
use crate::spectral::{hermitian_eig_with, SpectralDecomposition};

/// Strictly positive Hermitian operator with its eigendecomposition cached.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveOperator {
    matrix: HermitianMatrix,
    spectral: SpectralDecomposition,
}

impl PositiveOperator {
    pub fn new(matrix: HermitianMatrix) -> Result<Self> {
        Self::with_tolerances(matrix, &Tolerances::default())
    }

    pub fn with_tolerances(matrix: HermitianMatrix, tol: &Tolerances) -> Result<Self> {
        let spectral = hermitian_eig_with(&matrix, tol)?;
        Self::from_parts(matrix, spectral, tol)
    }

    fn from_parts(matrix: HermitianMatrix, spectral: SpectralDecomposition, tol: &Tolerances) -> Result<Self> {
        let lowest = spectral.min_eigenvalue();
        if !(lowest > tol.positivity_floor) {
            return Err(Error::NotPositive { eigenvalue: lowest, floor: tol.positivity_floor });
        }
        Ok(Self { matrix, spectral })
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn spectral(&self) -> &SpectralDecomposition {
        &self.spectral
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Trace as the ascending sum of eigenvalues.
    pub fn trace(&self) -> f64 {
        self.spectral.trace()
    }

    /// `lambda * self` for `lambda > 0`.
    pub fn scale(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!("dilation factor must be positive, got {lambda}")));
        }
        let tol = Tolerances::default();
        Self::from_parts(self.matrix.scale(lambda), self.spectral.scaled(lambda, &tol), &tol)
    }
}

/// Faithful density matrix: positive definite with unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState(PositiveOperator);

impl DensityState {
    pub fn new(matrix: HermitianMatrix) -> Result<Self> {
        Self::from_positive(PositiveOperator::new(matrix)?)
    }

    pub fn with_tolerances(matrix: HermitianMatrix, tol: &Tolerances) -> Result<Self> {
        let op = PositiveOperator::with_tolerances(matrix, tol)?;
        let tr = op.trace();
        if (tr - 1.0).abs() > tol.trace {
            return Err(Error::NotNormalized(tr));
        }
        Ok(Self(op))
    }

    pub fn from_positive(op: PositiveOperator) -> Result<Self> {
        let tr = op.trace();
        if (tr - 1.0).abs() > Tolerances::default().trace {
            return Err(Error::NotNormalized(tr));
        }
        Ok(Self(op))
    }

    /// Maximally mixed state `I/n`.
    pub fn maximally_mixed(n: usize) -> Self {
        Self::new(HermitianMatrix::identity(n).scale(1.0 / n as f64)).expect("I/n is a faithful state")
    }

    pub fn as_positive(&self) -> &PositiveOperator {
        &self.0
    }
}

impl Deref for DensityState {
    type Target = PositiveOperator;
    fn deref(&self) -> &PositiveOperator {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TangentKind {
    /// Tangent to the faithful states: traceless.
    StateSpace,
    /// Tangent to the cone of positive operators: any Hermitian matrix.
    Cone,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    matrix: HermitianMatrix,
    kind: TangentKind,
}

impl TangentVector {
    pub fn state(matrix: HermitianMatrix) -> Result<Self> {
        let tr = matrix.trace();
        if tr.abs() > Tolerances::default().traceless * 1f64.max(matrix.frobenius_norm()) {
            return Err(Error::NotTraceless(tr));
        }
        Ok(Self { matrix, kind: TangentKind::StateSpace })
    }

    pub fn cone(matrix: HermitianMatrix) -> Self {
        Self { matrix, kind: TangentKind::Cone }
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> HermitianMatrix {
        self.matrix
    }

    pub fn kind(&self) -> TangentKind {
        self.kind
    }
}

/// Self-adjoint observable `a`, the label of `l_a(rho) = Tr(rho a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable(pub HermitianMatrix);

impl Deref for Observable {
    type Target = HermitianMatrix;
    fn deref(&self) -> &HermitianMatrix {
        &self.0
    }
}

impl From<HermitianMatrix> for Observable {
    fn from(h: HermitianMatrix) -> Self {
        Self(h)
    }
}

/// `omega / Tr(omega)`; the eigendecomposition is rescaled, not recomputed.
pub fn project_to_states(omega: &PositiveOperator) -> DensityState {
    let tol = Tolerances::default();
    let tr = omega.trace();
    let matrix = omega.matrix().scale(1.0 / tr);
    let spectral = omega.spectral().scaled(1.0 / tr, &tol);
    DensityState(PositiveOperator { matrix, spectral })
}

/// Canonical immersion of the states into the cone.
pub fn immerse(rho: &DensityState) -> PositiveOperator {
    rho.0.clone()
}

/// Expectation value `Tr(x a)`.
pub fn expectation(a: &HermitianMatrix, x: &HermitianMatrix) -> Result<f64> {
    x.trace_product(a)
}

/// Generator of dilations: `Delta(omega) = omega`.
pub fn dilation_field(omega: &PositiveOperator) -> TangentVector {
    TangentVector::cone(omega.matrix().clone())
}

/// Traceless part `v - Tr(v) rho`.
pub fn tangent_project(v: &HermitianMatrix, rho: &DensityState) -> Result<TangentVector> {
    check_dims(v.dim(), rho.dim())?;
    let projected = v.axpy(-v.trace(), rho.matrix())?;
    Ok(TangentVector { matrix: projected, kind: TangentKind::StateSpace })
}

/// `{omega, a}` as used in the un-normalized fields; here only a helper for
/// [`dilation_field`] consistency checks.
pub fn anticomm_with(omega: &PositiveOperator, a: &HermitianMatrix) -> Result<HermitianMatrix> {
    anticomm(omega.matrix(), a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Density,
    Positive,
}

/// Matrix JSON plus a `kind` tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    pub kind: StateKind,
    #[serde(flatten)]
    pub matrix: MatrixJson,
}

/// A state read from JSON: either a faithful density matrix or an
/// invertible positive operator.
#[derive(Debug, Clone, PartialEq)]
pub enum StatePoint {
    Density(DensityState),
    Positive(PositiveOperator),
}

impl StatePoint {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: StateJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let m = ComplexMatrix::try_from(&j.matrix)?;
        let h = HermitianMatrix::new(m, Tolerances::default().hermitian)?;
        match j.kind {
            StateKind::Density => Ok(Self::Density(DensityState::new(h)?)),
            StateKind::Positive => Ok(Self::Positive(PositiveOperator::new(h)?)),
        }
    }

    pub fn to_json(&self) -> StateJson {
        match self {
            Self::Density(r) => StateJson { kind: StateKind::Density, matrix: r.matrix().matrix().to_json() },
            Self::Positive(w) => StateJson { kind: StateKind::Positive, matrix: w.matrix().matrix().to_json() },
        }
    }

    pub fn as_positive(&self) -> &PositiveOperator {
        match self {
            Self::Density(r) => r.as_positive(),
            Self::Positive(w) => w,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_density, random_tangent};

    #[test]
    fn projection_examples() {
        let w = PositiveOperator::new(HermitianMatrix::diag(&[2.0, 2.0])).unwrap();
        assert!(project_to_states(&w).matrix().distance(&HermitianMatrix::diag(&[0.5, 0.5])) < 1e-16);
        let w = PositiveOperator::new(HermitianMatrix::diag(&[1.0, 3.0])).unwrap();
        assert!(project_to_states(&w).matrix().distance(&HermitianMatrix::diag(&[0.25, 0.75])) < 1e-16);
        let rho = random_density(3, 11);
        let again = project_to_states(&immerse(&rho));
        assert!(again.matrix().distance(rho.matrix()) < 1e-15);
    }

    #[test]
    fn expectation_examples() {
        let rho = random_density(3, 5);
        let one = expectation(&HermitianMatrix::identity(3), rho.matrix()).unwrap();
        assert!((one - 1.0).abs() < 1e-14);
        let d = HermitianMatrix::diag(&[0.75, 0.25]);
        assert!((expectation(&HermitianMatrix::pauli_z(), &d).unwrap() - 0.5).abs() < 1e-16);
        let w = PositiveOperator::new(HermitianMatrix::diag(&[1.0, 3.0])).unwrap();
        let a = HermitianMatrix::pauli_x().add(&HermitianMatrix::diag(&[0.4, -2.0])).unwrap();
        let base = expectation(&a, w.matrix()).unwrap();
        let scaled = expectation(&a, w.scale(2.5).unwrap().matrix()).unwrap();
        assert!((scaled - 2.5 * base).abs() < 1e-14);
        assert!(expectation(&a, &HermitianMatrix::identity(3)).is_err());
    }

    #[test]
    fn dilation_is_identity_and_equals_anticommutator_with_one() {
        let w = PositiveOperator::new(HermitianMatrix::diag(&[1.0, 3.0])).unwrap();
        assert_eq!(dilation_field(&w).matrix(), w.matrix());
        let y = anticomm_with(&w, &HermitianMatrix::identity(2)).unwrap();
        assert!(y.distance(w.matrix()) < 1e-16);
        let half = DensityState::maximally_mixed(2);
        assert_eq!(dilation_field(&half).matrix(), half.matrix());
    }

    #[test]
    fn tangent_projection_examples() {
        let rho = random_density(2, 3);
        let z = HermitianMatrix::pauli_z();
        assert!(tangent_project(&z, &rho).unwrap().matrix().distance(&z) < 1e-16);
        assert!(tangent_project(rho.matrix(), &rho).unwrap().matrix().frobenius_norm() < 1e-15);
        let half = DensityState::maximally_mixed(2);
        assert!(tangent_project(&HermitianMatrix::identity(2), &half).unwrap().matrix().frobenius_norm() < 1e-16);
    }

    #[test]
    fn rejects_invalid_states() {
        assert!(matches!(PositiveOperator::new(HermitianMatrix::diag(&[1.0, 0.0])), Err(Error::NotPositive { .. })));
        assert!(matches!(DensityState::new(HermitianMatrix::diag(&[1.0, 1.0])), Err(Error::NotNormalized(_))));
        assert!(matches!(TangentVector::state(HermitianMatrix::identity(2)), Err(Error::NotTraceless(_))));
    }

    #[test]
    fn random_generators_are_deterministic_and_valid() {
        assert_eq!(random_density(2, 9), random_density(2, 9));
        let rho = random_density(4, 1);
        assert!(rho.spectral().min_eigenvalue() >= 1e-12);
        let v = random_tangent(&rho, 4);
        assert!(v.matrix().trace().abs() < 1e-12);
    }

    #[test]
    fn state_json_round_trip() {
        let rho = random_density(2, 21);
        let s = serde_json::to_string(&StatePoint::Density(rho.clone()).to_json()).unwrap();
        assert!(s.contains("\"kind\":\"density\""));
        match StatePoint::from_json_str(&s).unwrap() {
            StatePoint::Density(back) => assert!(back.matrix().distance(rho.matrix()) < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
        let bad = r#"{"kind":"density","dim":2,"re":[[1,0],[0,1]],"im":[[0,0],[0,0]]}"#;
        assert!(matches!(StatePoint::from_json_str(bad), Err(Error::NotNormalized(_))));
    }
}
