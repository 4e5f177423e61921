//! Dense square complex matrices and the Hermitian subspace.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const I: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_real_diagonal(&vec![1.0; dim])
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (j, &d) in diag.iter().enumerate() {
            m[(j, j)] = c(d);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for k in 0..dim {
                data.push(f(r, k));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from rows, rejecting ragged or non-finite input.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::NotSquare { rows: dim, row: r, len: row.len() });
            }
            for (k, z) in row.iter().enumerate() {
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite(r, k));
                }
                data.push(*z);
            }
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows.iter().map(|r| r.iter().map(|&x| c(x)).collect()).collect();
        Self::from_rows(&rows)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, k| self[(k, r)].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|j| self[(j, j)]).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from Hermiticity, `max |a_rk - conj(a_kr)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.dim {
            for k in r..self.dim {
                worst = worst.max((self[(r, k)] - self[(k, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `a ⊗ b` with row index `r_a * dim(b) + r_b`.
    pub fn kron(&self, other: &Self) -> Self {
        let nb = other.dim;
        Self::from_fn(self.dim * nb, |r, k| self[(r / nb, k / nb)] * other[(r % nb, k % nb)])
    }

    /// Exponential of an arbitrary (not necessarily normal) matrix by scaling
    /// and squaring of a truncated Taylor series. Only used for group curves
    /// `exp(t (a - i b) / 2)`; Hermitian functional calculus goes through
    /// [`crate::spectral`].
    pub fn expm_general(&self) -> Self {
        let norm = self.frobenius_norm();
        let mut squarings = 0u32;
        let mut scaled = norm;
        while scaled > 0.25 {
            scaled *= 0.5;
            squarings += 1;
        }
        let x = self.scale_real(0.5f64.powi(squarings as i32));
        let mut result = Self::identity(self.dim);
        let mut term = Self::identity(self.dim);
        for k in 1..=24 {
            term = (&term * &x).scale_real(1.0 / k as f64);
            result = &result + &term;
            if term.frobenius_norm() < 1e-18 * result.frobenius_norm() {
                break;
            }
        }
        for _ in 0..squarings {
            result = &result * &result;
        }
        result
    }

    /// Unitarity defect `|U†U - I|_F`.
    pub fn unitarity_defect(&self) -> f64 {
        (&(&self.adjoint() * self) - &Self::identity(self.dim)).frobenius_norm()
    }

    /// Hermitian part `(A + A†)/2`.
    pub fn hermitian_part(&self) -> HermitianMatrix {
        let half = c(0.5);
        HermitianMatrix(Self::from_fn(self.dim, |r, k| (self[(r, k)] + self[(k, r)].conj()) * half))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (r, k): (usize, usize)) -> &Complex64 {
        &self.data[r * self.dim + k]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, k): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.dim + k]
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix product");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for r in 0..n {
            for m in 0..n {
                let a = self.data[r * n + m];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for k in 0..n {
                    out.data[r * n + k] += a * rhs.data[m * n + k];
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix sum");
        ComplexMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix difference");
        ComplexMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|k| {
                    let z = self[(r, k)];
                    format!("{:+.6e}{:+.6e}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// A complex matrix equal to its adjoint. Construction symmetrizes exactly,
/// so the stored entries satisfy `a_rk == conj(a_kr)` bit for bit and the
/// diagonal is real.
#[derive(Clone, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    /// Validates Hermiticity within `tol` (absolute, entrywise) and stores the
    /// symmetrized matrix.
    pub fn new(m: ComplexMatrix, tol: f64) -> Result<Self> {
        if m.dim() == 0 {
            return Err(Error::EmptyMatrix);
        }
        if !m.is_finite() {
            return Err(Error::NonFinite(0, 0));
        }
        let defect = m.hermiticity_defect();
        if defect > tol {
            return Err(Error::NotHermitian(defect));
        }
        Ok(m.hermitian_part())
    }

    /// Hermitian part of a matrix known to be Hermitian up to rounding.
    pub fn from_hermitian_part(m: &ComplexMatrix) -> Self {
        m.hermitian_part()
    }

    pub fn zeros(dim: usize) -> Self {
        Self(ComplexMatrix::zeros(dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim))
    }

    pub fn diag(values: &[f64]) -> Self {
        Self(ComplexMatrix::from_real_diagonal(values))
    }

    pub fn pauli_x() -> Self {
        Self(ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).expect("static"))
    }

    pub fn pauli_y() -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self(ComplexMatrix::from_rows(&[vec![z, -I], vec![I, z]]).expect("static"))
    }

    pub fn pauli_z() -> Self {
        Self::diag(&[1.0, -1.0])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// Real trace (the imaginary part of a Hermitian trace is exactly zero).
    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale_real(s))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.frobenius_norm()
    }

    /// `Tr(self * other)`, real for Hermitian arguments.
    pub fn trace_product(&self, other: &HermitianMatrix) -> Result<f64> {
        check_dims(self.dim(), other.dim())?;
        let n = self.dim();
        let mut acc = 0.0;
        for r in 0..n {
            for k in 0..n {
                acc += (self.0[(r, k)] * other.0[(k, r)]).re;
            }
        }
        Ok(acc)
    }

    /// `U self U†` for an arbitrary square `u`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        check_dims(self.dim(), u.dim())?;
        Ok((&(u * &self.0) * &u.adjoint()).hermitian_part())
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|j| self.0[(j, j)].re).collect()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(self + other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(self - other)
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self(&self.0 + &other.0.scale_real(s)))
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (&self.0 - &other.0).frobenius_norm()
    }
}

impl<'a> Add<&'a HermitianMatrix> for &'a HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a HermitianMatrix> for &'a HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix(&self.0 - &rhs.0)
    }
}

impl Neg for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn neg(self) -> HermitianMatrix {
        self.scale(-1.0)
    }
}

impl Index<(usize, usize)> for HermitianMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.0[idx]
    }
}

impl fmt::Debug for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hermitian{:?}", self.0)
    }
}

pub(crate) fn check_dims(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(a, b))
    }
}

/// Commutator with the `(i/2)(ab - ba)` normalization.
pub fn comm(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    check_dims(a.dim(), b.dim())?;
    let ab = a.matrix() * b.matrix();
    let ba = b.matrix() * a.matrix();
    Ok((&ab - &ba).scale(Complex64::new(0.0, 0.5)).hermitian_part())
}

/// Anticommutator with the `(1/2)(ab + ba)` normalization.
pub fn anticomm(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    check_dims(a.dim(), b.dim())?;
    let ab = a.matrix() * b.matrix();
    let ba = b.matrix() * a.matrix();
    Ok((&ab + &ba).scale_real(0.5).hermitian_part())
}

/// Wire format shared by every matrix-valued input and output:
/// `{"dim": n, "re": [[...]], "im": [[...]]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        let n = m.dim();
        Self {
            dim: n,
            re: (0..n).map(|r| (0..n).map(|k| m[(r, k)].re).collect()).collect(),
            im: (0..n).map(|r| (0..n).map(|k| m[(r, k)].im).collect()).collect(),
        }
    }
}

impl TryFrom<&MatrixJson> for ComplexMatrix {
    type Error = Error;
    fn try_from(j: &MatrixJson) -> Result<Self> {
        if j.dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        if j.re.len() != j.dim || j.im.len() != j.dim {
            return Err(Error::Parse(format!(
                "expected {} rows in re/im, got {}/{}",
                j.dim,
                j.re.len(),
                j.im.len()
            )));
        }
        let mut rows = Vec::with_capacity(j.dim);
        for (r, (re, im)) in j.re.iter().zip(&j.im).enumerate() {
            if re.len() != j.dim || im.len() != j.dim {
                return Err(Error::Parse(format!("row {r} does not have {} entries", j.dim)));
            }
            rows.push(re.iter().zip(im).map(|(&x, &y)| Complex64::new(x, y)).collect());
        }
        ComplexMatrix::from_rows(&rows)
    }
}

impl ComplexMatrix {
    pub fn to_json(&self) -> MatrixJson {
        MatrixJson::from(self)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: MatrixJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        ComplexMatrix::try_from(&j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_commutator_vanishes() {
        let z = HermitianMatrix::pauli_z();
        assert_eq!(comm(&z, &z).unwrap().frobenius_norm(), 0.0);
    }

    #[test]
    fn anticommutator_with_identity_is_neutral() {
        let a = HermitianMatrix::pauli_x().add(&HermitianMatrix::diag(&[0.3, -1.2])).unwrap();
        let out = anticomm(&HermitianMatrix::identity(2), &a).unwrap();
        assert!(out.distance(&a) < 1e-15);
        let sq = anticomm(&a, &a).unwrap();
        let direct = (a.matrix() * a.matrix()).hermitian_part();
        assert!(sq.distance(&direct) < 1e-15);
    }

    #[test]
    fn commutator_uses_half_i_convention() {
        let rho = HermitianMatrix::diag(&[0.75, 0.25]);
        let out = comm(&rho, &HermitianMatrix::pauli_x()).unwrap();
        assert!((out[(0, 1)] - Complex64::new(0.0, 0.25)).norm() < 1e-15);
        assert!((out[(1, 0)] - Complex64::new(0.0, -0.25)).norm() < 1e-15);
        assert_eq!(out[(0, 0)].norm(), 0.0);
    }

    #[test]
    fn commutator_rejects_mismatched_dims() {
        let err = comm(&HermitianMatrix::identity(2), &HermitianMatrix::identity(3)).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch(2, 3));
    }

    #[test]
    fn hermitian_constructor_checks_and_symmetrizes() {
        let m = ComplexMatrix::from_real_rows(&[vec![1.0, 2.0], vec![2.0 + 5e-13, 3.0]]).unwrap();
        let h = HermitianMatrix::new(m, 1e-12).unwrap();
        assert_eq!(h[(0, 1)], h[(1, 0)].conj());
        let bad = ComplexMatrix::from_real_rows(&[vec![1.0, 2.0], vec![0.0, 3.0]]).unwrap();
        assert!(matches!(HermitianMatrix::new(bad, 1e-12), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn json_round_trip_and_malformed_input() {
        let y = HermitianMatrix::pauli_y();
        let s = serde_json::to_string(&y.matrix().to_json()).unwrap();
        let back = ComplexMatrix::from_json_str(&s).unwrap();
        assert_eq!(&back, y.matrix());
        assert!(ComplexMatrix::from_json_str(r#"{"dim":2,"re":[[1,0]],"im":[[0,0]]}"#).is_err());
        assert!(ComplexMatrix::from_json_str(r#"{"dim":2,"re":[[1,0],[0]],"im":[[0,0],[0,0]]}"#).is_err());
        assert!(ComplexMatrix::from_json_str("not json").is_err());
    }

    #[test]
    fn general_exponential_matches_diagonal_case() {
        let m = ComplexMatrix::from_rows(&[
            vec![Complex64::new(0.3, 0.1), Complex64::new(0.0, 0.0)],
            vec![Complex64::new(0.0, 0.0), Complex64::new(-2.0, 0.5)],
        ])
        .unwrap();
        let e = m.expm_general();
        assert!((e[(0, 0)] - Complex64::new(0.3, 0.1).exp()).norm() < 1e-14);
        assert!((e[(1, 1)] - Complex64::new(-2.0, 0.5).exp()).norm() < 1e-14);
        // Nilpotent part: exp([[0,1],[0,0]]) = [[1,1],[0,1]].
        let n = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let en = n.expm_general();
        assert!((en[(0, 1)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn kron_layout() {
        let a = ComplexMatrix::from_real_diagonal(&[1.0, 2.0]);
        let b = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let k = a.kron(&b);
        assert_eq!(k[(0, 1)].re, 1.0);
        assert_eq!(k[(2, 3)].re, 2.0);
        assert_eq!(k[(0, 3)].re, 0.0);
    }
}
