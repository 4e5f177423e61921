//! Candidate Petz functions: the deformation family `f_kappa`, the BKM
//! function, and two test functions. Scalar evaluation, the symmetry
//! conditions `f(1) = 1`, `f(t) = t f(1/t)`, and a seeded search for
//! violations of matrix monotonicity.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, HermitianMatrix};
use crate::random::{derive_seed, Sampler};
use crate::spectral::hermitian_eig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "variant")]
pub enum Variant {
    /// `f(x) = (kappa/2)(x - 1)(x^kappa + 1)/(x^kappa - 1)`.
    GlFamily { kappa: f64 },
    /// `f(x) = (x - 1)/ln x`.
    Bkm,
    /// `(1 + x)/2`, the family member at `kappa = 1`.
    BuresHelstrom,
    /// `(sqrt(x) + 1)^2/4`, the family member at `kappa = 1/2`.
    WignerYanase,
    /// `x^2`: normalized but neither symmetric nor operator monotone.
    TestSquare,
    /// `x`: operator monotone but not symmetric.
    TestIdentity,
}

/// A Petz function candidate with an overall positive scale `c`; `c`
/// multiplies the normalized function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonotoneFunctionSpec {
    pub variant: Variant,
    pub scale: f64,
}

impl MonotoneFunctionSpec {
    pub fn new(variant: Variant, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale must be positive, got {scale}")));
        }
        if let Variant::GlFamily { kappa } = variant {
            if !(kappa > 0.0 && kappa.is_finite()) {
                return Err(Error::InvalidParameter(format!("kappa must be positive, got {kappa}")));
            }
        }
        Ok(Self { variant, scale })
    }

    pub fn gl(kappa: f64) -> Result<Self> {
        Self::new(Variant::GlFamily { kappa }, 1.0)
    }

    pub fn bkm() -> Self {
        Self { variant: Variant::Bkm, scale: 1.0 }
    }

    pub fn bures_helstrom() -> Self {
        Self { variant: Variant::BuresHelstrom, scale: 1.0 }
    }

    pub fn wigner_yanase() -> Self {
        Self { variant: Variant::WignerYanase, scale: 1.0 }
    }

    pub fn test_square() -> Self {
        Self { variant: Variant::TestSquare, scale: 1.0 }
    }

    pub fn test_identity() -> Self {
        Self { variant: Variant::TestIdentity, scale: 1.0 }
    }

    pub fn with_scale(self, scale: f64) -> Result<Self> {
        Self::new(self.variant, scale)
    }

    /// Exponent of the deformation family, resolving the aliases.
    pub fn kappa(&self) -> Option<f64> {
        match self.variant {
            Variant::GlFamily { kappa } => Some(kappa),
            Variant::BuresHelstrom => Some(1.0),
            Variant::WignerYanase => Some(0.5),
            _ => None,
        }
    }

    /// Whether the spec is expected to satisfy both symmetry conditions.
    pub fn is_symmetric_family(&self) -> bool {
        !matches!(self.variant, Variant::TestSquare | Variant::TestIdentity)
    }

    /// Scaled function value; `x <= 0` is a domain error.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::Domain(x));
        }
        Ok(self.scale * self.normalized(x))
    }

    /// Continuous extension to `x >= 0`, used for matrix arguments whose
    /// spectrum may touch zero.
    pub(crate) fn eval_closed(&self, x: f64) -> f64 {
        if x > 0.0 {
            return self.scale * self.normalized(x);
        }
        let at_zero = match self.variant {
            Variant::TestSquare | Variant::TestIdentity | Variant::Bkm => 0.0,
            _ => 0.5 * self.kappa().expect("family member"),
        };
        self.scale * at_zero
    }

    fn normalized(&self, x: f64) -> f64 {
        match self.variant {
            Variant::GlFamily { kappa } => gl_normalized(kappa, x),
            Variant::BuresHelstrom => 0.5 * (1.0 + x),
            Variant::WignerYanase => {
                let s = x.sqrt() + 1.0;
                0.25 * s * s
            }
            Variant::Bkm => bkm_normalized(x),
            Variant::TestSquare => x * x,
            Variant::TestIdentity => x,
        }
    }

    /// `f(A)` for Hermitian `A >= 0` (eigenvalues within rounding of zero
    /// are clamped to zero).
    pub fn apply_to_matrix(&self, a: &HermitianMatrix) -> Result<HermitianMatrix> {
        let s = hermitian_eig(a)?;
        let floor = -1e-12 * 1f64.max(s.operator_norm());
        if s.min_eigenvalue() < floor {
            return Err(Error::Domain(s.min_eigenvalue()));
        }
        s.apply_scalar_function(|p| self.eval_closed(p.max(0.0)))
    }
}

/// Half-width of the series branch around `x = 1`.
pub const SERIES_BRANCH: f64 = 1e-6;

/// `f_kappa` with `x^kappa - 1` evaluated as `expm1(kappa ln1p(x - 1))`; the
/// second order expansion `1 + u/2 + (kappa^2 - 1) u^2/12` is used near 1.
fn gl_normalized(kappa: f64, x: f64) -> f64 {
    let u = x - 1.0;
    if u.abs() < SERIES_BRANCH {
        return 1.0 + 0.5 * u + (kappa * kappa - 1.0) * u * u / 12.0;
    }
    let em = (kappa * u.ln_1p()).exp_m1();
    0.5 * kappa * u * (em + 2.0) / em
}

fn bkm_normalized(x: f64) -> f64 {
    let u = x - 1.0;
    if u.abs() < SERIES_BRANCH {
        return 1.0 + 0.5 * u - u * u / 12.0;
    }
    u / u.ln_1p()
}

impl fmt::Display for MonotoneFunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = match self.variant {
            Variant::GlFamily { kappa } => format!("gl:{kappa}"),
            Variant::Bkm => "bkm".into(),
            Variant::BuresHelstrom => "bh".into(),
            Variant::WignerYanase => "wy".into(),
            Variant::TestSquare => "test:square".into(),
            Variant::TestIdentity => "test:identity".into(),
        };
        if self.scale == 1.0 {
            f.write_str(&base)
        } else {
            write!(f, "{base}*{}", self.scale)
        }
    }
}

/// Parses `gl:<kappa>`, `bkm`, `bh`, `wy`, `test:square`, `test:identity`,
/// each optionally followed by `*<scale>`.
impl FromStr for MonotoneFunctionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (base, scale) = match s.split_once('*') {
            Some((b, c)) => {
                let c: f64 = c.trim().parse().map_err(|_| Error::Parse(format!("bad scale in spec '{s}'")))?;
                (b.trim(), c)
            }
            None => (s, 1.0),
        };
        let variant = match base.to_ascii_lowercase().as_str() {
            "bkm" => Variant::Bkm,
            "bh" => Variant::BuresHelstrom,
            "wy" => Variant::WignerYanase,
            "test:square" => Variant::TestSquare,
            "test:identity" => Variant::TestIdentity,
            other => match other.strip_prefix("gl:") {
                Some(k) => Variant::GlFamily {
                    kappa: k.parse().map_err(|_| Error::Parse(format!("bad kappa in spec '{s}'")))?,
                },
                None => return Err(Error::Parse(format!("unknown spec '{s}'"))),
            },
        };
        Self::new(variant, scale)
    }
}

pub fn eval_f(spec: &MonotoneFunctionSpec, x: f64) -> Result<f64> {
    spec.eval(x)
}

/// `n` points log-spaced on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && lo > 0.0 && hi > lo);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// The grid used by symmetry checks: 61 points on `[1e-3, 1e3]`.
pub fn standard_grid() -> Vec<f64> {
    log_grid(1e-3, 1e3, 61)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    /// `max |f(t) - t f(1/t)| / f(t)` over the grid.
    pub max_symmetry_residual: f64,
    /// `|f(1) - scale|`.
    pub normalization_residual: f64,
    pub violated: bool,
}

pub fn check_symmetry(spec: &MonotoneFunctionSpec, grid: &[f64]) -> Result<SymmetryReport> {
    let mut worst = 0.0f64;
    for &t in grid {
        let ft = spec.eval(t)?;
        let mirrored = t * spec.eval(1.0 / t)?;
        worst = worst.max((ft - mirrored).abs() / ft.abs());
    }
    let normalization_residual = (spec.eval(1.0)? - spec.scale).abs();
    let violated = worst > 1e-10 || normalization_residual > 1e-10 * spec.scale;
    Ok(SymmetryReport { max_symmetry_residual: worst, normalization_residual, violated })
}

/// Threshold below which `lambda_min(f(B) - f(A))` counts as a violation.
pub const WITNESS_THRESHOLD: f64 = -1e-8;

/// A pair `A <= B` with `f(B) - f(A)` not positive semi-definite.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub trial: usize,
    pub a: HermitianMatrix,
    pub b: HermitianMatrix,
    pub min_eigenvalue: f64,
}

/// `lambda_min(f(B) - f(A))`.
pub fn check_pair(spec: &MonotoneFunctionSpec, a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    let diff = spec.apply_to_matrix(b)?.sub(&spec.apply_to_matrix(a)?)?;
    Ok(hermitian_eig(&diff)?.min_eigenvalue())
}

/// One guided sample: `A` with log-uniform spectrum in `[1e-4, 10]` in a
/// random eigenbasis, `B = A + t v v†` with `t` at most the smallest
/// eigenvalue of `A`.
fn sample_pair(sampler: &mut Sampler, n: usize) -> (HermitianMatrix, HermitianMatrix) {
    let values: Vec<f64> = (0..n).map(|_| sampler.log_uniform(1e-4, 10.0)).collect();
    let u = sampler.unitary(n);
    let a = HermitianMatrix::diag(&values).conjugate_by(&u).expect("same dimension");
    let mut v: Vec<num_complex::Complex64> =
        (0..n).map(|_| num_complex::Complex64::new(sampler.normal(), sampler.normal())).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
    let lowest = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let t = lowest * 10f64.powf(-3.0 * sampler.uniform());
    let p = ComplexMatrix::from_fn(n, |r, c| v[r] * v[c].conj() * t).hermitian_part();
    let b = a.add(&p).expect("same dimension");
    (a, b)
}

/// Seeded falsification search. Returns the lowest-index trial whose pair
/// violates monotonicity beyond [`WITNESS_THRESHOLD`], or `None`, which only
/// means no violation was found at this many trials.
pub fn matrix_monotonicity_witness(
    spec: &MonotoneFunctionSpec,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<Option<Witness>> {
    if n < 2 || trials == 0 {
        return Err(Error::InvalidParameter("witness search needs n >= 2 and trials >= 1".into()));
    }
    let attempt = |trial: usize| -> Result<Option<Witness>> {
        let mut sampler = Sampler::new(derive_seed(seed, &[n as u64, trial as u64]));
        let (a, b) = sample_pair(&mut sampler, n);
        let min_eigenvalue = check_pair(spec, &a, &b)?;
        Ok((min_eigenvalue < WITNESS_THRESHOLD).then_some(Witness { trial, a, b, min_eigenvalue }))
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..trials).into_par_iter().map(attempt).find_map_first(|r| r.transpose()).transpose()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..trials).map(attempt).find_map(|r| r.transpose()).transpose()
    }
}

/// Limit of `f'(x)` as `x -> 0+`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeAtZero {
    Finite(f64),
    PosInfinity,
}

impl DerivativeAtZero {
    pub fn finite(self) -> Option<f64> {
        match self {
            Self::Finite(v) => Some(v),
            Self::PosInfinity => None,
        }
    }
}

/// Forward difference quotients at `x = 10^-k`, `k = 3..=8`, with step
/// `x/100`. Growing successive differences report `+inf`; otherwise the
/// last three quotients are Aitken-extrapolated.
pub fn derivative_at_zero_plus(spec: &MonotoneFunctionSpec) -> Result<DerivativeAtZero> {
    if spec.kappa().is_none() {
        return Err(Error::Unsupported(format!("derivative at zero is defined for the deformation family, not {spec}")));
    }
    let q: Vec<f64> = (3..=8)
        .map(|k| {
            let x = 10f64.powi(-k);
            let h = 0.01 * x;
            Ok((spec.eval(x + h)? - spec.eval(x)?) / h)
        })
        .collect::<Result<_>>()?;
    let d: Vec<f64> = q.windows(2).map(|w| w[1] - w[0]).collect();
    let m = d.len();
    // Rounding in the quotient at x = 1e-8 is about 1e-6.
    let noise = 1e-5 * q[q.len() - 1].abs().max(1.0);
    let growing = d[m - 1].abs() > noise && d[m - 1].abs() >= d[m - 2].abs();
    if growing {
        if q[q.len() - 1] > q[q.len() - 2] {
            return Ok(DerivativeAtZero::PosInfinity);
        }
        return Err(Error::NoConvergence { sweeps: q.len(), residual: d[m - 1].abs() });
    }
    let (x0, x1, x2) = (q[q.len() - 3], q[q.len() - 2], q[q.len() - 1]);
    let denom = (x2 - x1) - (x1 - x0);
    let value = if denom.abs() <= noise { x2 } else { x2 - (x2 - x1).powi(2) / denom };
    Ok(DerivativeAtZero::Finite(value))
}

/// `f_{k/m}` rewritten as `(kappa/2)(x^kappa + 1 + sum_l g_l(x) + sum_l h_l(x))`
/// with `g_l = (sum_{j<k} x^{(j-l)/m})^-1`, `h_l = (sum_{j<k} x^{(j-l-k)/m})^-1`,
/// `l = k..m-1`. Requires `0 < k < m`.
pub fn gl_rational_decomposition(k: u32, m: u32, x: f64) -> Result<f64> {
    if !(0 < k && k < m) {
        return Err(Error::InvalidParameter(format!("need 0 < k < m, got k = {k}, m = {m}")));
    }
    if !(x > 0.0) {
        return Err(Error::Domain(x));
    }
    let (kf, mf) = (k as f64, m as f64);
    let pw = |e: f64| x.powf(e / mf);
    let mut total = pw(kf) + 1.0;
    for l in k..m {
        let g: f64 = (0..k).map(|j| pw(j as f64 - l as f64)).sum();
        let h: f64 = (0..k).map(|j| pw(j as f64 - l as f64 - kf)).sum();
        total += 1.0 / g + 1.0 / h;
    }
    Ok(0.5 * kf / mf * total)
}
