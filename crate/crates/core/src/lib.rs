//! Finite-dimensional laboratory for triple-bracket (Lie-Nambu) dynamics of
//! density matrices.
//!
//! The crate is `no_std` and only needs an allocator. It contains:
//!
//! - [`matrix`]: dense complex matrices, Hermitian/density newtypes, a Jacobi
//!   eigensolver, matrix functions and seeded random states.
//! - [`functionals`]: scalar functionals `F[ρ]` with their gradients
//!   `δF/δρ` (linear observables, Casimirs `Tr ρⁿ`, Rényi-type generators).
//! - [`brackets`]: Lie-Poisson and Lie-Nambu brackets in matrix form and
//!   explicit structure-constant tensors over a generalized Gell-Mann basis.
//! - [`dynamics`]: RK4 and isospectral integrators for `ρ̇ = −i[∇H, ∇S]`.
//! - [`multipartite`]: tensor products, partial traces and no-signaling probes.
//! - [`dirac`]: the 2-spinor Dirac equation in momentum space.
//!
//! File formats and the command-line runner live in the `nambu-lab` crate.

#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod brackets;
pub mod dirac;
pub mod dynamics;
mod error;
pub mod functionals;
pub mod matrix;
pub mod multipartite;

pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, DensityMatrix, HermitianMatrix, Spectrum};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
