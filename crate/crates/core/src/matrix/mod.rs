//! Dense complex-matrix substrate.
//!
//! [`ComplexMatrix`] is a plain row-major square matrix. [`HermitianMatrix`]
//! and [`DensityMatrix`] are validated newtypes over it; both deref to the
//! underlying matrix so the arithmetic helpers are available everywhere.

mod eigen;
mod random;

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Deref, Index, IndexMut, Mul, Neg, Sub};

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result, C64};

pub use eigen::Spectrum;
pub use random::{
    random_complex_vector, random_density, random_full_rank_density, random_hermitian, seeded_rng,
    SeededRng,
};
pub(crate) use random::{random_density_with, random_hermitian_with};

/// Per-entry tolerance of the Hermitian invariant.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Smallest eigenvalue a [`DensityMatrix`] may have.
pub const PSD_TOL: f64 = 1e-10;
/// Eigenvalues below this are treated as exact zeros by fractional powers.
pub const EIGEN_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from `dim * dim` row-major entries.
    pub fn from_vec(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim || dim == 0 {
            return Err(Error::NotSquare {
                rows: dim,
                cols: data.len().checked_div(dim).unwrap_or(0),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(ComplexMatrix { dim, data })
    }

    /// Builds a matrix from rows, rejecting ragged or non-square input.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::NotSquare {
                rows: dim,
                cols: bad.len(),
            });
        }
        Self::from_vec(dim, rows.iter().flatten().copied().collect())
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { dim, data }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &x) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(x, 0.0);
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &ComplexMatrix) -> C64 {
        debug_assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                acc += self.data[i * n + k] * other.data[k * n + i];
            }
        }
        acc
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn kron(&self, other: &ComplexMatrix) -> Self {
        let (n, m) = (self.dim, other.dim);
        Self::from_fn(n * m, |i, j| self[(i / m, j / m)] * other[(i % m, j % m)])
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        debug_assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| (0..self.dim).map(|k| self[(i, k)] * v[k]).sum())
            .collect()
    }

    /// Largest `|M_ij − conj(M_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub(crate) fn check_same_dim(&self, other: &ComplexMatrix) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_same_dim(other)?;
        Ok(self * other)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix product dimension mismatch");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix sum dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix difference dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

/// `AB − BA`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.check_same_dim(b)?;
    Ok(&(a * b) - &(b * a))
}

/// `(M + M†)/2`.
pub fn hermitize(m: &ComplexMatrix) -> HermitianMatrix {
    let n = m.dim;
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..n {
        out[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let z = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            out[(i, j)] = z;
            out[(j, i)] = z.conj();
        }
    }
    HermitianMatrix(out)
}

/// A matrix equal to its conjugate transpose within [`HERMITIAN_TOL`].
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let defect = m.hermitian_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian {
                max_asymmetry: defect,
            });
        }
        Ok(hermitize(&m))
    }

    pub fn identity(dim: usize) -> Self {
        HermitianMatrix(ComplexMatrix::identity(dim))
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianMatrix(ComplexMatrix::zeros(dim))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        HermitianMatrix(ComplexMatrix::from_real_diagonal(diag))
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn eig(&self) -> Result<Spectrum> {
        eigen::eig_hermitian(self)
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianMatrix(self.0.scale_real(s))
    }

    pub fn add(&self, other: &HermitianMatrix) -> Self {
        HermitianMatrix(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &HermitianMatrix) -> Self {
        HermitianMatrix(&self.0 - &other.0)
    }

    /// `self + s·1`.
    pub fn add_identity(&self, s: f64) -> Self {
        let mut m = self.0.clone();
        for i in 0..m.dim() {
            m[(i, i)] += C64::new(s, 0.0);
        }
        HermitianMatrix(m)
    }

    /// Real part of `Tr(self · rho)`.
    pub fn expectation(&self, rho: &ComplexMatrix) -> f64 {
        self.0.trace_product(rho).re
    }

    /// Entries of `−i t·self` exponentiated: `exp(−i t H)`, via the spectrum.
    pub fn unitary_exp(&self, t: f64) -> Result<ComplexMatrix> {
        let spec = self.eig()?;
        let phases: Vec<C64> = spec
            .values()
            .iter()
            .map(|&w| C64::from_polar(1.0, -w * t))
            .collect();
        Ok(spec.reassemble(&phases))
    }

    pub fn kron(&self, other: &HermitianMatrix) -> Self {
        HermitianMatrix(self.0.kron(&other.0))
    }

    /// `U · self · U†`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Self {
        hermitize(&(&(u * &self.0) * &u.adjoint()))
    }
}

impl Deref for HermitianMatrix {
    type Target = ComplexMatrix;
    fn deref(&self) -> &ComplexMatrix {
        &self.0
    }
}

/// Hermitian, positive semidefinite (eigenvalues ≥ −[`PSD_TOL`]) and with
/// positive trace. The trace is not required to be one.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(HermitianMatrix);

impl DensityMatrix {
    pub fn new(h: HermitianMatrix) -> Result<Self> {
        Self::with_tolerance(h, PSD_TOL)
    }

    /// Validates with a caller-chosen lower bound `−psd_tol` on the spectrum.
    pub fn with_tolerance(h: HermitianMatrix, psd_tol: f64) -> Result<Self> {
        if !h.is_finite() {
            return Err(Error::NonFinite);
        }
        let trace = h.trace().re;
        if trace <= 0.0 || trace.is_nan() {
            return Err(Error::NonPositiveTrace { trace });
        }
        let spec = h.eig()?;
        let min = spec.values()[0];
        if min < -psd_tol {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
        Ok(DensityMatrix(h))
    }

    pub fn from_matrix(m: ComplexMatrix) -> Result<Self> {
        Self::new(HermitianMatrix::new(m)?)
    }

    /// Wraps without spectral validation; used for integrator output whose
    /// PSD defect is reported as a diagnostic instead.
    pub(crate) fn from_hermitian_unchecked(h: HermitianMatrix) -> Self {
        DensityMatrix(h)
    }

    /// Pure state `ψψ†`.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let n = psi.len();
        if n == 0 {
            return Err(Error::Domain("empty state vector".into()));
        }
        let m = ComplexMatrix::from_fn(n, |i, j| psi[i] * psi[j].conj());
        Self::new(hermitize(&m))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix(HermitianMatrix::identity(dim).scale(1.0 / dim as f64))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(HermitianMatrix::from_real_diagonal(diag))
    }

    pub fn as_hermitian(&self) -> &HermitianMatrix {
        &self.0
    }

    pub fn into_hermitian(self) -> HermitianMatrix {
        self.0
    }

    pub fn trace_real(&self) -> f64 {
        self.0.trace().re
    }

    /// `λρ` for `λ > 0`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::Domain("scale factor must be positive".into()));
        }
        Ok(DensityMatrix(self.0.scale(lambda)))
    }

    /// `ρ / Tr ρ`.
    pub fn normalized(&self) -> Self {
        DensityMatrix(self.0.scale(1.0 / self.trace_real()))
    }
}

impl Deref for DensityMatrix {
    type Target = HermitianMatrix;
    fn deref(&self) -> &HermitianMatrix {
        &self.0
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn eig_hermitian(m: &HermitianMatrix) -> Result<Spectrum> {
    eigen::eig_hermitian(m)
}

/// `V diag(clip(p)^s) V†` with eigenvalues below [`EIGEN_FLOOR`] mapped to 0
/// for every `s ≥ 0` (including `0⁰ := 0`).
pub fn matrix_power(rho: &DensityMatrix, s: f64) -> Result<HermitianMatrix> {
    power_from_spectrum(&rho.eig()?, s)
}

/// [`matrix_power`] on a precomputed spectrum.
pub fn power_from_spectrum(spec: &Spectrum, s: f64) -> Result<HermitianMatrix> {
    if !(s >= 0.0) {
        return Err(Error::Domain("matrix power exponent must be >= 0".into()));
    }
    Ok(spec.map(|p| floored_power(p, s)))
}

/// Scalar counterpart of [`matrix_power`].
#[inline]
pub fn floored_power(p: f64, s: f64) -> f64 {
    if p < EIGEN_FLOOR {
        0.0
    } else {
        p.powf(s)
    }
}

/// Real part of `Tr ρⁿ` by repeated multiplication.
pub fn trace_power(rho: &DensityMatrix, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("trace power order must be >= 1".into()));
    }
    let value = if n == 1 {
        rho.trace()
    } else {
        let half = integer_power(rho, n - 1);
        half.trace_product(rho)
    };
    if value.im.abs() > 1e-12 * value.re.abs().max(1.0) {
        return Err(Error::Consistency(alloc::format!(
            "Tr(rho^{n}) has imaginary part {:e}",
            value.im
        )));
    }
    Ok(value.re)
}

/// `ρᵏ` by repeated multiplication, with `ρ⁰ = 1`.
pub fn integer_power(rho: &ComplexMatrix, k: u32) -> ComplexMatrix {
    let mut acc = ComplexMatrix::identity(rho.dim());
    for _ in 0..k {
        acc = &acc * rho;
    }
    acc
}
