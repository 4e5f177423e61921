//! Hermitian eigendecomposition and the functional calculus built on it.
//!
//! The eigensolver is a cyclic complex Jacobi iteration. Each rotation first
//! removes the phase of the pivot `a_pq` and then applies the real symmetric
//! rotation that annihilates it, so orthogonality of the accumulated
//! eigenvector matrix stays at the rounding level regardless of degeneracy.
//!
//! Everything that needs `f(A)` or a derivative of `A -> f(A)` goes through a
//! [`SpectralDecomposition`]: scalar functions act on the eigenvalues,
//! first divided differences act entrywise in the eigenbasis (Schur product),
//! and coincident eigenvalues are grouped into clusters on which the
//! difference quotient is replaced by the derivative.

use num_complex::Complex64;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::matrix::{check_dims, ComplexMatrix, HermitianMatrix};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues (ascending), unitary eigenvector matrix (columns) and the
/// partition of indices into clusters of numerically coincident eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
    clusters: Vec<Vec<usize>>,
    cluster_of: Vec<usize>,
    near_degenerate_rel: f64,
}

/// Real `n x n` coefficient table acting entrywise in an eigenbasis.
pub type Table = Vec<Vec<f64>>;

pub fn hermitian_eig(a: &HermitianMatrix) -> Result<SpectralDecomposition> {
    hermitian_eig_with(a, &Tolerances::default())
}

pub fn hermitian_eig_with(a: &HermitianMatrix, tol: &Tolerances) -> Result<SpectralDecomposition> {
    let n = a.dim();
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    let mut m = a.matrix().clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = m.frobenius_norm();

    let mut converged = scale == 0.0 || n == 1;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, residual: off_diagonal_norm(&m) });
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
        converged = off_diagonal_norm(&m) <= f64::EPSILON * scale;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| m[(x, x)].re.total_cmp(&m[(y, y)].re));
    let eigenvalues: Vec<f64> = order.iter().map(|&j| m[(j, j)].re).collect();
    let mut vectors = ComplexMatrix::from_fn(n, |r, k| v[(r, order[k])]);
    fix_phases(&mut vectors);

    let (clusters, cluster_of) = cluster(&eigenvalues, tol.cluster_rel);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors: vectors,
        clusters,
        cluster_of,
        near_degenerate_rel: tol.near_degenerate_rel,
    })
}

fn off_diagonal_norm(m: &ComplexMatrix) -> f64 {
    let n = m.dim();
    let mut acc = 0.0;
    for r in 0..n {
        for k in 0..n {
            if r != k {
                acc += m[(r, k)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// One complex Jacobi rotation annihilating `m[p][q]`; accumulates into `v`.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag;
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau.abs() > 1e150 {
        0.5 / tau
    } else {
        let sign = if tau >= 0.0 { 1.0 } else { -1.0 };
        sign / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // G = [[c, s], [-s e^{-i theta}, c e^{-i theta}]] on the (p, q) plane.
    let g_qp = -phase.conj() * s;
    let g_qq = phase.conj() * c;
    let n = m.dim();
    for k in 0..n {
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        m[(k, p)] = akp * c + akq * g_qp;
        m[(k, q)] = akp * s + akq * g_qq;
    }
    for k in 0..n {
        let apk = m[(p, k)];
        let aqk = m[(q, k)];
        m[(p, k)] = apk * c + aqk * g_qp.conj();
        m[(q, k)] = apk * s + aqk * g_qq.conj();
    }
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    m[(p, p)].im = 0.0;
    m[(q, q)].im = 0.0;
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * g_qp;
        v[(k, q)] = vkp * s + vkq * g_qq;
    }
}

/// Makes the largest-magnitude component of every column real and positive.
/// Ties within a relative 1e-12 resolve to the smallest row index.
fn fix_phases(v: &mut ComplexMatrix) {
    let n = v.dim();
    for k in 0..n {
        let largest = (0..n).map(|r| v[(r, k)].norm()).fold(0.0, f64::max);
        let pivot = (0..n).find(|&r| v[(r, k)].norm() >= largest * (1.0 - 1e-12)).unwrap_or(0);
        let z = v[(pivot, k)];
        if z.norm() == 0.0 {
            continue;
        }
        let rot = z.conj() / z.norm();
        for r in 0..n {
            v[(r, k)] *= rot;
        }
        v[(pivot, k)] = Complex64::new(v[(pivot, k)].norm(), 0.0);
    }
}

/// Groups ascending eigenvalues into chains whose neighbours differ by at
/// most `rel * max(1, |p_j|, |p_k|)`.
fn cluster(values: &[f64], rel: f64) -> (Vec<Vec<usize>>, Vec<usize>) {
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut cluster_of = vec![0; values.len()];
    for (j, &x) in values.iter().enumerate() {
        let joins = j > 0 && coincident(values[j - 1], x, rel);
        if !joins {
            clusters.push(Vec::new());
        }
        let id = clusters.len() - 1;
        clusters[id].push(j);
        cluster_of[j] = id;
    }
    (clusters, cluster_of)
}

#[inline]
fn coincident(x: f64, y: f64, rel: f64) -> bool {
    (x - y).abs() <= rel * 1f64.max(x.abs()).max(y.abs())
}

/// Purely relative closeness, used to switch divided differences to the
/// midpoint derivative.
fn relatively_close(x: f64, y: f64, rel: f64) -> bool {
    (x - y).abs() <= rel * x.abs().max(y.abs())
}

impl SpectralDecomposition {
    /// Whether entry `(j, k)` of a divided difference should use the
    /// derivative at the midpoint: same cluster, or relative gap below the
    /// near-degenerate threshold.
    pub fn near_degenerate(&self, j: usize, k: usize) -> bool {
        self.same_cluster(j, k) || relatively_close(self.eigenvalues[j], self.eigenvalues[k], self.near_degenerate_rel)
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Decomposition of `s * A` for `s > 0`, reusing the eigenvectors.
    pub fn scaled(&self, s: f64, tol: &Tolerances) -> Self {
        assert!(s > 0.0, "scaled() requires a positive factor");
        let eigenvalues: Vec<f64> = self.eigenvalues.iter().map(|p| p * s).collect();
        let (clusters, cluster_of) = cluster(&eigenvalues, tol.cluster_rel);
        Self {
            eigenvalues,
            eigenvectors: self.eigenvectors.clone(),
            clusters,
            cluster_of,
            near_degenerate_rel: self.near_degenerate_rel,
        }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    pub fn same_cluster(&self, j: usize, k: usize) -> bool {
        self.cluster_of[j] == self.cluster_of[k]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty")
    }

    /// Sum of eigenvalues in ascending order.
    pub fn trace(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }

    pub fn operator_norm(&self) -> f64 {
        self.min_eigenvalue().abs().max(self.max_eigenvalue().abs())
    }

    /// Components `U† A U` of `a` in this eigenbasis.
    pub fn to_eigenbasis(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_dims(self.dim(), a.dim())?;
        let u = &self.eigenvectors;
        Ok(&(&u.adjoint() * a) * u)
    }

    /// Inverse of [`Self::to_eigenbasis`]: `U B U†`.
    pub fn from_eigenbasis(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_dims(self.dim(), b.dim())?;
        let u = &self.eigenvectors;
        Ok(&(u * b) * &u.adjoint())
    }

    /// `U diag(values) U†`.
    pub fn synthesize(&self, values: &[f64]) -> HermitianMatrix {
        let d = ComplexMatrix::from_real_diagonal(values);
        let u = &self.eigenvectors;
        (&(u * &d) * &u.adjoint()).hermitian_part()
    }

    /// `U diag(f(p)) U†` for a complex-valued `f` (e.g. `exp(-i t p)`).
    pub fn map_complex(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let n = self.dim();
        let mut d = ComplexMatrix::zeros(n);
        for (j, &p) in self.eigenvalues.iter().enumerate() {
            d[(j, j)] = f(p);
        }
        let u = &self.eigenvectors;
        &(u * &d) * &u.adjoint()
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.synthesize(&self.eigenvalues)
    }

    /// Applies `f` to every eigenvalue; a non-finite value is a domain error
    /// naming the offending eigenvalue.
    pub fn apply_scalar_function(&self, f: impl Fn(f64) -> f64) -> Result<HermitianMatrix> {
        let values = self.map_values(f)?;
        Ok(self.synthesize(&values))
    }

    fn map_values(&self, f: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
        self.eigenvalues
            .iter()
            .map(|&p| {
                let y = f(p);
                if y.is_finite() {
                    Ok(y)
                } else {
                    Err(Error::Domain(p))
                }
            })
            .collect()
    }

    /// First divided difference table of `f` on the spectrum.
    ///
    /// Entries of distinct clusters use the difference quotient, except when
    /// the gap is below the near-degenerate threshold where `f'` at the
    /// midpoint is used instead (the difference quotient loses all digits
    /// there). Entries inside a cluster use `f'`.
    pub fn first_divided_difference(
        &self,
        f: impl Fn(f64) -> f64,
        fprime: impl Fn(f64) -> f64,
    ) -> Result<Table> {
        let values = self.map_values(&f)?;
        let n = self.dim();
        let mut table = vec![vec![0.0; n]; n];
        for j in 0..n {
            for k in j..n {
                let (x, y) = (self.eigenvalues[j], self.eigenvalues[k]);
                let entry = if j == k {
                    fprime(x)
                } else if self.near_degenerate(j, k) {
                    fprime(0.5 * (x + y))
                } else {
                    (values[j] - values[k]) / (x - y)
                };
                if !entry.is_finite() {
                    return Err(Error::Domain(x));
                }
                table[j][k] = entry;
                table[k][j] = entry;
            }
        }
        Ok(table)
    }

    /// Schur product: the eigenbasis components `a_jk` are multiplied by
    /// `table[j][k]`.
    pub fn schur_product(&self, table: &Table, a: &HermitianMatrix) -> Result<HermitianMatrix> {
        let n = self.dim();
        check_dims(n, a.dim())?;
        if table.len() != n || table.iter().any(|row| row.len() != n) {
            return Err(Error::DimensionMismatch(n, table.len()));
        }
        for j in 0..n {
            for k in j + 1..n {
                let (x, y) = (table[j][k], table[k][j]);
                if (x - y).abs() > 1e-12 * 1f64.max(x.abs()) {
                    return Err(Error::InvalidParameter(format!("table is not symmetric at ({j}, {k})")));
                }
            }
        }
        self.entrywise(a, |j, k| table[j][k])
    }

    /// Multiplies eigenbasis components of `a` by `coeff(j, k)`, which must
    /// be symmetric in `(j, k)` for the result to be Hermitian.
    pub fn entrywise(&self, a: &HermitianMatrix, coeff: impl Fn(usize, usize) -> f64) -> Result<HermitianMatrix> {
        let mut b = self.to_eigenbasis(a.matrix())?;
        let n = self.dim();
        for j in 0..n {
            for k in 0..n {
                b[(j, k)] *= coeff(j, k);
            }
        }
        Ok(self.from_eigenbasis(&b)?.hermitian_part())
    }

    fn require_positive(&self) -> Result<()> {
        match self.eigenvalues.iter().find(|&&p| p <= 0.0) {
            Some(&p) => Err(Error::Domain(p)),
            None => Ok(()),
        }
    }

    pub fn matrix_power(&self, t: f64) -> Result<HermitianMatrix> {
        self.require_positive()?;
        self.apply_scalar_function(|x| x.powf(t))
    }

    pub fn matrix_log(&self) -> Result<HermitianMatrix> {
        self.require_positive()?;
        self.apply_scalar_function(f64::ln)
    }

    pub fn matrix_exp(&self) -> Result<HermitianMatrix> {
        self.apply_scalar_function(f64::exp)
    }

    /// Directional derivative `d/dt exp(A + tV)` at `t = 0` with `A` the
    /// decomposed matrix. Coefficients `(e^a_j - e^a_k)/(a_j - a_k)` are
    /// evaluated as `e^a_k expm1(a_j - a_k)/(a_j - a_k)`.
    pub fn dexp_directional(&self, v: &HermitianMatrix) -> Result<HermitianMatrix> {
        let n = self.dim();
        let a = &self.eigenvalues;
        let mut table = vec![vec![0.0; n]; n];
        for j in 0..n {
            for k in j..n {
                let d = a[j] - a[k];
                let entry = if j == k || d == 0.0 { a[j].exp() } else { a[k].exp() * d.exp_m1() / d };
                table[j][k] = entry;
                table[k][j] = entry;
            }
        }
        self.entrywise(v, |j, k| table[j][k])
    }
}

pub fn matrix_exp(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    hermitian_eig(a)?.matrix_exp()
}

pub fn matrix_log(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    hermitian_eig(a)?.matrix_log()
}

pub fn matrix_power(a: &HermitianMatrix, t: f64) -> Result<HermitianMatrix> {
    hermitian_eig(a)?.matrix_power(t)
}

pub fn dexp_directional(a: &HermitianMatrix, v: &HermitianMatrix) -> Result<HermitianMatrix> {
    check_dims(a.dim(), v.dim())?;
    hermitian_eig(a)?.dexp_directional(v)
}

/// `exp(-i t h)` for Hermitian `h`: a unitary.
pub fn unitary_exp(h: &HermitianMatrix, t: f64) -> Result<ComplexMatrix> {
    let s = hermitian_eig(h)?;
    Ok(s.map_complex(|p| Complex64::new(0.0, -t * p).exp()))
}

/// Scalar first divided difference with the same near-degenerate handling as
/// [`SpectralDecomposition::first_divided_difference`].
pub fn divided_difference(f: impl Fn(f64) -> f64, fprime: impl Fn(f64) -> f64, x: f64, y: f64, rel: f64) -> f64 {
    if x == y || relatively_close(x, y, rel) {
        fprime(0.5 * (x + y))
    } else {
        (f(x) - f(y)) / (x - y)
    }
}
