//! Quantum channels in Kraus form, the partial trace, and the contraction
//! check `G_{F(rho)}(F(v), F(v)) <= G_rho(v, v)` for monotone metrics.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{check_dims, ComplexMatrix, HermitianMatrix, I};
use crate::petz::{MetricSpec, PetzSuperoperator};
use crate::random::{derive_seed, Sampler};
use crate::state::{project_to_states, DensityState, PositiveOperator};

/// Completeness tolerance for `sum_i K_i† K_i = I`.
pub const COMPLETENESS_TOL: f64 = 1e-10;

/// `Tr_B X` for `X` on `H_A (x) H_B`, rows indexed `r_a * dim_b + r_b`.
pub fn partial_trace(x: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<ComplexMatrix> {
    check_dims(x.dim(), dim_a * dim_b)?;
    Ok(ComplexMatrix::from_fn(dim_a, |r, c| (0..dim_b).map(|e| x[(r * dim_b + e, c * dim_b + e)]).sum()))
}

/// An isometry `V: C^n -> C^n (x) C^env` stored row-major, rows indexed
/// `out * env + e`.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry {
    n: usize,
    env: usize,
    rows: Vec<Vec<Complex64>>,
}

impl Isometry {
    /// Gram-Schmidt (applied twice) on `n` Gaussian columns of length
    /// `n * env`.
    fn random(sampler: &mut Sampler, n: usize, env: usize) -> Self {
        let len = n * env;
        let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
        while cols.len() < n {
            let mut v: Vec<Complex64> = (0..len).map(|_| Complex64::new(sampler.normal(), sampler.normal())).collect();
            for _ in 0..2 {
                for q in &cols {
                    let dot: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                    v.iter_mut().zip(q).for_each(|(x, qi)| *x -= dot * qi);
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-8 {
                v.iter_mut().for_each(|z| *z /= norm);
                cols.push(v);
            }
        }
        let rows = (0..len).map(|r| (0..n).map(|c| cols[c][r]).collect()).collect();
        Self { n, env, rows }
    }

    /// `V X V†` on the dilated space.
    pub fn conjugate(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_dims(self.n, x.dim())?;
        let len = self.n * self.env;
        let vx: Vec<Vec<Complex64>> = (0..len)
            .map(|r| (0..self.n).map(|c| (0..self.n).map(|k| self.rows[r][k] * x[(k, c)]).sum()).collect())
            .collect();
        Ok(ComplexMatrix::from_fn(len, |r, c| (0..self.n).map(|k| vx[r][k] * self.rows[c][k].conj()).sum()))
    }

    fn kraus(&self) -> Vec<ComplexMatrix> {
        (0..self.env)
            .map(|e| ComplexMatrix::from_fn(self.n, |r, c| self.rows[r * self.env + e][c]))
            .collect()
    }
}

/// A channel on `n x n` matrices given by square Kraus operators.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    kraus: Vec<ComplexMatrix>,
    dilation: Option<Isometry>,
}

impl Channel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or(Error::EmptyMatrix)?;
        let n = first.dim();
        let mut sum = ComplexMatrix::zeros(n);
        for k in &kraus {
            check_dims(n, k.dim())?;
            sum = &sum + &(&k.adjoint() * k);
        }
        let defect = (&sum - &ComplexMatrix::identity(n)).max_abs();
        if defect > COMPLETENESS_TOL {
            return Err(Error::NotTracePreserving(defect));
        }
        Ok(Self { kraus, dilation: None })
    }

    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    /// `rho -> (1 - p) rho + p Tr(rho) I/n` with Kraus operators
    /// `sqrt(1 - p + p/n^2) I` and `(sqrt(p)/n) X^a Z^b`, `(a, b) != (0, 0)`.
    pub fn depolarizing(n: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("depolarizing weight must lie in [0, 1], got {p}")));
        }
        let nf = n as f64;
        let mut kraus = vec![ComplexMatrix::identity(n).scale_real((1.0 - p + p / (nf * nf)).sqrt())];
        let w = std::f64::consts::TAU / nf;
        for a in 0..n {
            for b in 0..n {
                if a == 0 && b == 0 {
                    continue;
                }
                let weyl = ComplexMatrix::from_fn(n, |r, c| {
                    if r == (c + a) % n {
                        (I * (w * (b * c) as f64)).exp()
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                });
                kraus.push(weyl.scale_real(p.sqrt() / nf));
            }
        }
        Self::new(kraus)
    }

    /// Stinespring construction: a random isometry into `C^n (x) C^env`,
    /// sliced into `env` Kraus operators.
    pub fn random_cptp(n: usize, env: usize, seed: u64) -> Result<Self> {
        Self::random_with(&mut Sampler::new(seed), n, env)
    }

    pub fn random_with(sampler: &mut Sampler, n: usize, env: usize) -> Result<Self> {
        if n == 0 || env == 0 {
            return Err(Error::InvalidParameter("channel dimensions must be positive".into()));
        }
        let iso = Isometry::random(sampler, n, env);
        let mut ch = Self::new(iso.kraus())?;
        ch.dilation = Some(iso);
        Ok(ch)
    }

    pub fn dim(&self) -> usize {
        self.kraus[0].dim()
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn dilation(&self) -> Option<&Isometry> {
        self.dilation.as_ref()
    }

    /// `sum_i K_i x K_i†`.
    pub fn apply(&self, x: &HermitianMatrix) -> Result<HermitianMatrix> {
        check_dims(self.dim(), x.dim())?;
        let mut out = ComplexMatrix::zeros(self.dim());
        for k in &self.kraus {
            out = &out + &(&(k * x.matrix()) * &k.adjoint());
        }
        Ok(out.hermitian_part())
    }

    /// `Tr_env(V x V†)`, available for channels built from an isometry.
    pub fn apply_dilated(&self, x: &HermitianMatrix) -> Option<Result<HermitianMatrix>> {
        self.dilation.as_ref().map(|iso| {
            let big = iso.conjugate(x.matrix())?;
            Ok(partial_trace(&big, iso.n, iso.env)?.hermitian_part())
        })
    }

    /// Image of a faithful state; `None` when the image is not faithful.
    pub fn apply_state(&self, rho: &DensityState) -> Result<Option<DensityState>> {
        let out = self.apply(rho.matrix())?;
        match PositiveOperator::new(out) {
            Ok(op) => Ok(Some(project_to_states(&op))),
            Err(Error::NotPositive { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    }
}

/// `1 - G_{F(rho)}(F(v), F(v)) / G_rho(v, v)`: non-negative for a monotone
/// metric. `None` when `F(rho)` is not faithful.
pub fn contraction_margin(m: &MetricSpec, channel: &Channel, rho: &DensityState, v: &HermitianMatrix) -> Result<Option<f64>> {
    let before = PetzSuperoperator::build(rho, &m.function)?.inverse_pairing(v, v)?;
    let Some(out) = channel.apply_state(rho)? else {
        return Ok(None);
    };
    let fv = channel.apply(v)?;
    let after = PetzSuperoperator::build(&out, &m.function)?.inverse_pairing(&fv, &fv)?;
    Ok(Some(1.0 - after / before))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelFamily {
    Random,
    Depolarizing,
    Unitary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    pub trials: usize,
    pub skipped: usize,
    pub min_margin: f64,
    /// Trial indices with margin below `-violation`.
    pub violations: Vec<usize>,
}

/// Parameters of a contraction sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractionSweep {
    pub family: ChannelFamily,
    pub n: usize,
    pub env: usize,
    pub trials: usize,
    pub seed: u64,
    /// Margins below `-violation` are violations.
    pub violation: f64,
    /// Draw states with spectra log-uniform on `[1e-4, 1]` before
    /// normalization, where non-monotone functions misbehave.
    pub adversarial: bool,
}

impl ContractionSweep {
    pub fn new(family: ChannelFamily, n: usize, trials: usize, seed: u64) -> Self {
        Self { family, n, env: 2, trials, seed, violation: 1e-8, adversarial: false }
    }
}

/// Samples `(channel, rho, v)` and records the contraction margin.
pub fn cptp_contraction_check(m: &MetricSpec, sweep: &ContractionSweep) -> Result<ContractionReport> {
    let ContractionSweep { family, n, env, trials, seed, violation, adversarial } = *sweep;
    let one = |trial: usize| -> Result<Option<f64>> {
        let mut s = Sampler::new(derive_seed(seed, &[n as u64, env as u64, trial as u64]));
        let channel = match family {
            ChannelFamily::Random => Channel::random_with(&mut s, n, env)?,
            ChannelFamily::Depolarizing => Channel::depolarizing(n, s.uniform())?,
            ChannelFamily::Unitary => Channel::unitary(s.unitary(n))?,
        };
        let rho = if adversarial { skewed_state(&mut s, n) } else { s.density(n) };
        let v = s.tangent(&rho);
        contraction_margin(m, &channel, &rho, v.matrix())
    };
    #[cfg(feature = "parallel")]
    let margins: Vec<Result<Option<f64>>> = {
        use rayon::prelude::*;
        (0..trials).into_par_iter().map(one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let margins: Vec<Result<Option<f64>>> = (0..trials).map(one).collect();

    let mut report = ContractionReport { trials, skipped: 0, min_margin: f64::INFINITY, violations: Vec::new() };
    for (trial, r) in margins.into_iter().enumerate() {
        match r {
            Ok(Some(margin)) => {
                report.min_margin = report.min_margin.min(margin);
                if margin < -violation {
                    report.violations.push(trial);
                }
            }
            Ok(None) | Err(Error::NotPositive { .. }) | Err(Error::Domain(_)) => report.skipped += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}

fn skewed_state(s: &mut Sampler, n: usize) -> DensityState {
    let p: Vec<f64> = (0..n).map(|_| s.log_uniform(1e-4, 1.0)).collect();
    let total: f64 = p.iter().sum();
    let p: Vec<f64> = p.iter().map(|x| x / total).collect();
    let u = s.unitary(n);
    let m = HermitianMatrix::diag(&p).conjugate_by(&u).expect("same dimension");
    let op = PositiveOperator::new(m).expect("spectrum bounded below");
    project_to_states(&op)
}
