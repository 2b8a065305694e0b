//! Seeded random states and observables.
//!
//! The generator is ChaCha8 seeded through `SeedableRng::seed_from_u64`, and
//! Gaussian draws use `rand_distr::StandardNormal`. Identical seeds give
//! bit-identical matrices within one build.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

use super::{hermitize, ComplexMatrix, DensityMatrix, HermitianMatrix};
use crate::{Error, Result, C64};

pub type SeededRng = rand_chacha::ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    SeededRng::seed_from_u64(seed)
}

/// `n` standard complex normal draws (`E|z|² = 1`).
pub fn random_complex_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    (0..n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(re * s, im * s)
        })
        .collect()
}

/// `G G† / Tr(G G†)` with `G` a `d × rank` complex Gaussian matrix.
pub fn random_density(d: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    random_density_with(&mut seeded_rng(seed), d, rank)
}

pub(crate) fn random_density_with<R: Rng + ?Sized>(
    rng: &mut R,
    d: usize,
    rank: usize,
) -> Result<DensityMatrix> {
    if d == 0 || rank == 0 || rank > d {
        return Err(Error::Domain(alloc::format!(
            "rank {rank} must lie in 1..={d}"
        )));
    }
    let g = random_complex_vector(rng, d * rank);
    let m = ComplexMatrix::from_fn(d, |i, j| {
        (0..rank)
            .map(|k| g[i * rank + k] * g[j * rank + k].conj())
            .sum()
    });
    let trace = m.trace().re;
    DensityMatrix::new(hermitize(&m.scale_real(1.0 / trace)))
}

/// `0.9 W + 0.1·1/d` with `W = random_density(d, d, seed)`, so every
/// eigenvalue is at least `0.1/d`.
pub fn random_full_rank_density(d: usize, seed: u64) -> Result<DensityMatrix> {
    let w = random_density(d, d, seed)?;
    DensityMatrix::new(w.as_hermitian().scale(0.9).add_identity(0.1 / d as f64))
}

/// Hermitian part of a complex Gaussian matrix.
pub fn random_hermitian(d: usize, seed: u64) -> HermitianMatrix {
    random_hermitian_with(&mut seeded_rng(seed), d)
}

pub(crate) fn random_hermitian_with<R: Rng + ?Sized>(rng: &mut R, d: usize) -> HermitianMatrix {
    let g = random_complex_vector(rng, d * d);
    hermitize(&ComplexMatrix::from_vec(d, g).expect("d*d entries"))
}
