//! Seeded samplers for states, observables, tangent vectors and group
//! elements. A [`Sampler`] owns its generator state; nothing is global.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matrix::{ComplexMatrix, HermitianMatrix};
use crate::spectral::{hermitian_eig, unitary_exp};
use crate::state::{tangent_project, DensityState, Observable, PositiveOperator, TangentVector};

/// Weight of `I/n` mixed into sampled states so their spectrum stays away
/// from zero.
pub const MIXING_WEIGHT: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Uniform on `[lo, hi)` in log scale.
    pub fn log_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        (lo.ln() + self.uniform() * (hi.ln() - lo.ln())).exp()
    }

    /// Matrix with i.i.d. standard complex Gaussian entries.
    pub fn ginibre(&mut self, n: usize) -> ComplexMatrix {
        let scale = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::from_fn(n, |_, _| Complex64::new(self.normal() * scale, self.normal() * scale))
    }

    /// GUE-like Hermitian matrix `(G + G†)/2`.
    pub fn hermitian(&mut self, n: usize) -> HermitianMatrix {
        self.ginibre(n).hermitian_part()
    }

    pub fn observable(&mut self, n: usize) -> Observable {
        Observable(self.hermitian(n))
    }

    /// `G G† / Tr(G G†)` mixed with `I/n` at [`MIXING_WEIGHT`].
    pub fn density(&mut self, n: usize) -> DensityState {
        let g = self.ginibre(n);
        let w = (&g * &g.adjoint()).hermitian_part();
        let s = hermitian_eig(&w).expect("Gram matrix decomposes");
        let tr: f64 = s.eigenvalues().iter().sum();
        let mixed = w
            .scale((1.0 - MIXING_WEIGHT) / tr)
            .axpy(MIXING_WEIGHT / n as f64, &HermitianMatrix::identity(n))
            .expect("same dimension");
        // Renormalize by the eigenvalue sum so the trace is 1 to rounding.
        let s = hermitian_eig(&mixed).expect("state decomposes");
        let tr: f64 = s.eigenvalues().iter().sum();
        DensityState::new(mixed.scale(1.0 / tr)).expect("sampled state is faithful")
    }

    /// Random invertible positive operator: a sampled state times a
    /// log-uniform mass in `[0.1, 10]`.
    pub fn positive(&mut self, n: usize) -> PositiveOperator {
        let rho = self.density(n);
        let mass = self.log_uniform(0.1, 10.0);
        rho.as_positive().scale(mass).expect("positive mass")
    }

    pub fn tangent(&mut self, rho: &DensityState) -> TangentVector {
        let h = self.hermitian(rho.dim());
        tangent_project(&h, rho).expect("same dimension")
    }

    /// `exp(-i H)` for a GUE sample `H`.
    pub fn unitary(&mut self, n: usize) -> ComplexMatrix {
        let h = self.hermitian(n);
        unitary_exp(&h, 1.0).expect("Hermitian generator decomposes")
    }

    /// `U (I + G / (2 sqrt n))`, resampled until well conditioned.
    pub fn gl_element(&mut self, n: usize) -> ComplexMatrix {
        loop {
            let g = self.ginibre(n).scale_real(0.5 / (n as f64).sqrt());
            let base = &ComplexMatrix::identity(n) + &g;
            let u = self.unitary(n);
            let m = &u * &base;
            let gram = (&m.adjoint() * &m).hermitian_part();
            let smallest = hermitian_eig(&gram).expect("Gram matrix decomposes").min_eigenvalue();
            if smallest.max(0.0).sqrt() > 1e-3 {
                return m;
            }
        }
    }
}

pub fn random_density(n: usize, seed: u64) -> DensityState {
    Sampler::new(seed).density(n)
}

pub fn random_observable(n: usize, seed: u64) -> Observable {
    Sampler::new(seed).observable(n)
}

pub fn random_tangent(rho: &DensityState, seed: u64) -> TangentVector {
    Sampler::new(seed).tangent(rho)
}

/// Stable seed for a cell of a sweep: SplitMix64 folded over the master seed
/// and the cell coordinates.
pub fn derive_seed(master: u64, coords: &[u64]) -> u64 {
    let mut h = splitmix(master ^ 0x51_7c_c1_b7_27_22_0a_95);
    for &c in coords {
        h = splitmix(h ^ c.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    }
    h
}

/// Bit pattern of a float coordinate for [`derive_seed`].
pub fn coord_f64(x: f64) -> u64 {
    x.to_bits()
}

/// Hash of a label for [`derive_seed`] (FNV-1a).
pub fn coord_str(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_samples_are_unitary() {
        let mut s = Sampler::new(3);
        for n in 2..6 {
            assert!(s.unitary(n).unitarity_defect() < 1e-13);
        }
    }

    #[test]
    fn derived_seeds_differ_per_cell() {
        let a = derive_seed(7, &[2, coord_f64(0.5)]);
        let b = derive_seed(7, &[3, coord_f64(0.5)]);
        let c = derive_seed(8, &[2, coord_f64(0.5)]);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, derive_seed(7, &[2, coord_f64(0.5)]));
    }

    #[test]
    fn density_samples_respect_mixing_floor() {
        let mut s = Sampler::new(1);
        for n in 2..7 {
            let rho = s.density(n);
            assert!(rho.spectral().min_eigenvalue() >= MIXING_WEIGHT / n as f64 * (1.0 - 1e-9));
            assert!((rho.trace() - 1.0).abs() < 1e-14);
        }
    }
}
