//! Cyclic complex Jacobi eigensolver for Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` and then applies
//! the real symmetric Schur rotation, so `J = diag(1, e^{−iφ})·G` acts on the
//! `(p, q)` plane. Jacobi keeps small eigenvalues accurate relative to the
//! matrix norm, which the floored fractional powers rely on.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::{ComplexMatrix, HermitianMatrix};
use crate::{Error, Result, C64};

const MAX_SWEEPS: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
    vectors: ComplexMatrix,
}

impl Spectrum {
    /// Eigenvalues, ascending.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Unitary matrix whose columns are the eigenvectors.
    pub fn vectors(&self) -> &ComplexMatrix {
        &self.vectors
    }

    /// `V diag(f(p)) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let diag: Vec<C64> = self.values.iter().map(|&p| C64::new(f(p), 0.0)).collect();
        super::hermitize(&self.reassemble(&diag))
    }

    /// `V diag(values) V†` for real values given per eigenvalue.
    pub fn map_values(&self, values: &[f64]) -> HermitianMatrix {
        let diag: Vec<C64> = values.iter().map(|&x| C64::new(x, 0.0)).collect();
        super::hermitize(&self.reassemble(&diag))
    }

    /// `V diag(d) V†` for arbitrary complex diagonal entries.
    pub fn reassemble(&self, diag: &[C64]) -> ComplexMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        ComplexMatrix::from_fn(n, |i, j| {
            (0..n).map(|k| v[(i, k)] * diag[k] * v[(j, k)].conj()).sum()
        })
    }

    /// `V diag(p) V†`.
    pub fn reconstruct(&self) -> HermitianMatrix {
        self.map(|p| p)
    }

    /// `V† M V`: `M` expressed in the eigenbasis.
    pub fn to_eigenbasis(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let v = &self.vectors;
        &(&v.adjoint() * m) * v
    }

    /// `V M V†`: back from the eigenbasis.
    pub fn from_eigenbasis(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let v = &self.vectors;
        &(v * m) * &v.adjoint()
    }
}

pub(super) fn eig_hermitian(h: &HermitianMatrix) -> Result<Spectrum> {
    let n = h.dim();
    let mut a = h.as_matrix().clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.max_abs();
    if !scale.is_finite() {
        return Err(Error::NonFinite);
    }
    // Pivots below this are numerically zero relative to the matrix.
    let threshold = f64::EPSILON * 1e-3 * scale;

    let mut converged = n < 2 || scale == 0.0;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(Error::EigenNoConvergence {
                norm: scale,
                sweeps,
            });
        }
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= threshold {
                    a[(p, q)] = C64::new(0.0, 0.0);
                    a[(q, p)] = C64::new(0.0, 0.0);
                    continue;
                }
                rotated = true;
                rotate(&mut a, &mut v, p, q, apq / r, r);
            }
        }
        converged = !rotated;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |i, k| v[(i, order[k])]);
    Ok(Spectrum { values, vectors })
}

/// Zeroes `a[p][q]` by `A ← J† A J`, `V ← V J`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, phase: C64, r: f64) {
    let n = a.dim();
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let e_minus = phase.conj();

    // Columns: A J.
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * e_minus * s;
        a[(k, q)] = akp * s + akq * e_minus * c;
    }
    // Rows: J† (A J).
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * phase * s;
        a[(q, k)] = apk * s + aqk * phase * c;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * e_minus * s;
        v[(k, q)] = vkp * s + vkq * e_minus * c;
    }
}
