//! Lie-Poisson and Lie-Nambu brackets.
//!
//! Matrix form, with real values and a `−i` prefactor:
//!
//! - `{F, G}(ρ) = −i Tr(ρ [∇F, ∇G])`
//! - `[F, G, H](ρ) = −i Tr(∇F [∇G, ∇H])`
//! - `ρ̇ = −i [∇H, ∇S]`
//!
//! With `S = C₂/2` (gradient `ρ`) and linear `H = Tr(Ĥρ)` the flow is the
//! von Neumann equation `iρ̇ = [Ĥ, ρ]`.
//!
//! The component form uses an orthonormal Hermitian basis `T_a` of `d × d`
//! matrices (generalized Gell-Mann plus `1/√d`), structure constants
//! `Ω_abc = −i Tr(T_a [T_b, T_c])` and the trace metric `g_ab = Tr(T_a T_b)`.

use alloc::vec;
use alloc::vec::Vec;

use itertools::Itertools;

#[allow(unused_imports)]
use num_traits::Float;

use crate::functionals::Functional;
use crate::matrix::{commutator, hermitize, ComplexMatrix, DensityMatrix, HermitianMatrix};
use crate::{Error, Result, C64};

const REAL_TOL: f64 = 1e-12;

/// `−i z` after checking that `z` is purely imaginary.
fn minus_i_imaginary(z: C64, what: &str) -> Result<f64> {
    if z.re.abs() > REAL_TOL * z.im.abs().max(1.0) {
        return Err(Error::Consistency(alloc::format!(
            "{what} has real residue {:e}",
            z.re
        )));
    }
    Ok(z.im)
}

/// `{F, G}(ρ) = −i Tr(ρ [∇F, ∇G])`.
pub fn lie_poisson<F, G>(f: &F, g: &G, rho: &DensityMatrix) -> Result<f64>
where
    F: Functional + ?Sized,
    G: Functional + ?Sized,
{
    let (fa, gb) = (f.gradient(rho)?, g.gradient(rho)?);
    let c = commutator(fa.as_matrix(), gb.as_matrix())?;
    rho.check_same_dim(&c)?;
    minus_i_imaginary(rho.trace_product(&c), "Lie-Poisson bracket")
}

/// `[F, G, H](ρ) = −i Tr(∇F [∇G, ∇H])`.
pub fn lie_nambu<F, G, H>(f: &F, g: &G, h: &H, rho: &DensityMatrix) -> Result<f64>
where
    F: Functional + ?Sized,
    G: Functional + ?Sized,
    H: Functional + ?Sized,
{
    let df = f.gradient(rho)?;
    let (ga, hb) = (g.gradient(rho)?, h.gradient(rho)?);
    let c = commutator(ga.as_matrix(), hb.as_matrix())?;
    df.check_same_dim(&c)?;
    minus_i_imaginary(df.trace_product(&c), "Lie-Nambu bracket")
}

/// The right-hand side `ρ̇ = −i [∇H, ∇S]`.
pub fn nambu_rhs<H, S>(h: &H, s: &S, rho: &DensityMatrix) -> Result<HermitianMatrix>
where
    H: Functional + ?Sized,
    S: Functional + ?Sized,
{
    let (ha, sb) = (h.gradient(rho)?, s.gradient(rho)?);
    let c = commutator(ha.as_matrix(), sb.as_matrix())?;
    Ok(hermitize(&c.scale(C64::new(0.0, -1.0))))
}

/// A real functional of a state vector `Ψ`.
///
/// Only `∂F/∂Ψ̄` is supplied; for real `F`, `∂F/∂Ψ` is its complex conjugate.
pub trait WaveFunctional {
    fn value(&self, psi: &[C64]) -> Result<f64>;
    fn conj_gradient(&self, psi: &[C64]) -> Result<Vec<C64>>;
}

/// `F(Ψ) = F[ΨΨ†]` for a density-matrix functional: `∂F/∂Ψ̄ = ∇F Ψ`.
pub struct Induced<F>(pub F);

impl<F: Functional> WaveFunctional for Induced<F> {
    fn value(&self, psi: &[C64]) -> Result<f64> {
        self.0.value(&DensityMatrix::pure(psi)?)
    }
    fn conj_gradient(&self, psi: &[C64]) -> Result<Vec<C64>> {
        Ok(self.0.gradient(&DensityMatrix::pure(psi)?)?.apply(psi))
    }
}

/// `‖Ψ‖²`, the generator of global phase rotations.
pub struct NormSquared;

impl WaveFunctional for NormSquared {
    fn value(&self, psi: &[C64]) -> Result<f64> {
        Ok(psi.iter().map(|z| z.norm_sqr()).sum())
    }
    fn conj_gradient(&self, psi: &[C64]) -> Result<Vec<C64>> {
        Ok(psi.to_vec())
    }
}

/// Canonical bracket `−i Σ_k (∂F/∂Ψ_k ∂G/∂Ψ̄_k − ∂G/∂Ψ_k ∂F/∂Ψ̄_k)`.
pub fn pure_state_bracket<F, G>(f: &F, g: &G, psi: &[C64]) -> Result<f64>
where
    F: WaveFunctional + ?Sized,
    G: WaveFunctional + ?Sized,
{
    let fb = f.conj_gradient(psi)?;
    let gb = g.conj_gradient(psi)?;
    for v in [&fb, &gb] {
        if v.len() != psi.len() {
            return Err(Error::DimensionMismatch {
                expected: psi.len(),
                found: v.len(),
            });
        }
    }
    let z: C64 = fb
        .iter()
        .zip(&gb)
        .map(|(a, b)| a.conj() * b - b.conj() * a)
        .sum();
    minus_i_imaginary(z, "canonical bracket")
}

/// Orthonormal Hermitian basis of `d × d` matrices.
///
/// Order: for each pair `j < k` the symmetric `(E_jk + E_kj)/√2` followed by
/// the antisymmetric `−i(E_jk − E_kj)/√2`; then the diagonal generators
/// `diag(1, …, 1, −l, 0, …)/√(l(l+1))` for `l = 1..d−1`; the normalized
/// identity `1/√d` comes last.
pub fn gell_mann_basis(d: usize) -> Vec<HermitianMatrix> {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let mut basis = Vec::with_capacity(d * d);
    for (j, k) in (0..d).tuple_combinations() {
        let mut sym = ComplexMatrix::zeros(d);
        sym[(j, k)] = C64::new(s, 0.0);
        sym[(k, j)] = C64::new(s, 0.0);
        basis.push(hermitize(&sym));
        let mut anti = ComplexMatrix::zeros(d);
        anti[(j, k)] = C64::new(0.0, -s);
        anti[(k, j)] = C64::new(0.0, s);
        basis.push(hermitize(&anti));
    }
    for l in 1..d {
        let norm = ((l * (l + 1)) as f64).sqrt();
        let diag: Vec<f64> = (0..d)
            .map(|i| match i {
                i if i < l => 1.0 / norm,
                i if i == l => -(l as f64) / norm,
                _ => 0.0,
            })
            .collect();
        basis.push(HermitianMatrix::from_real_diagonal(&diag));
    }
    basis.push(HermitianMatrix::identity(d).scale(1.0 / (d as f64).sqrt()));
    basis
}

/// Real components `x_a = Tr(T_a X)` of a Hermitian matrix.
pub fn components(basis: &[HermitianMatrix], x: &ComplexMatrix) -> Vec<f64> {
    basis.iter().map(|t| t.trace_product(x).re).collect()
}

/// Structure constants and metrics over [`gell_mann_basis`].
///
/// Arrays are flattened row-major: `g[a·n + b]`, `Ω[(a·n + b)·n + c]` with
/// `n = d²`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureTensor {
    d: usize,
    basis: Vec<HermitianMatrix>,
    g_lower: Vec<f64>,
    g_upper: Vec<f64>,
    omega_lower: Vec<f64>,
    omega_mixed: Vec<f64>,
}

pub fn structure_tensor(d: usize) -> Result<StructureTensor> {
    if !(2..=4).contains(&d) {
        return Err(Error::Domain(alloc::format!(
            "structure tensor needs 2 <= d <= 4, got {d}"
        )));
    }
    let basis = gell_mann_basis(d);
    let n = basis.len();
    let g_lower: Vec<f64> = (0..n)
        .cartesian_product(0..n)
        .map(|(a, b)| basis[a].trace_product(&basis[b]).re)
        .collect();
    let g_upper = invert(&g_lower, n)?;

    let mut omega_lower = vec![0.0; n * n * n];
    for b in 0..n {
        for c in 0..n {
            let bc = commutator(&basis[b], &basis[c])?;
            for a in 0..n {
                omega_lower[(a * n + b) * n + c] = basis[a].trace_product(&bc).im;
            }
        }
    }
    let mut omega_mixed = vec![0.0; n * n * n];
    for (a, bc) in (0..n).cartesian_product(0..n * n) {
        omega_mixed[a * n * n + bc] = (0..n)
            .map(|e| g_upper[a * n + e] * omega_lower[e * n * n + bc])
            .sum();
    }
    Ok(StructureTensor {
        d,
        basis,
        g_lower,
        g_upper,
        omega_lower,
        omega_mixed,
    })
}

/// Gauss-Jordan inverse with partial pivoting.
fn invert(m: &[f64], n: usize) -> Result<Vec<f64>> {
    let mut a = m.to_vec();
    let mut inv: Vec<f64> = (0..n * n)
        .map(|i| if i / n == i % n { 1.0 } else { 0.0 })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .expect("non-empty range");
        if a[pivot * n + col].abs() < 1e-14 {
            return Err(Error::Consistency("metric is singular".into()));
        }
        for k in 0..n {
            a.swap(col * n + k, pivot * n + k);
            inv.swap(col * n + k, pivot * n + k);
        }
        let p = a[col * n + col];
        for k in 0..n {
            a[col * n + k] /= p;
            inv[col * n + k] /= p;
        }
        for row in (0..n).filter(|&r| r != col) {
            let factor = a[row * n + col];
            if factor != 0.0 {
                for k in 0..n {
                    a[row * n + k] -= factor * a[col * n + k];
                    inv[row * n + k] -= factor * inv[col * n + k];
                }
            }
        }
    }
    Ok(inv)
}

impl StructureTensor {
    pub fn dim(&self) -> usize {
        self.d
    }

    /// Number of basis elements, `d²`.
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[HermitianMatrix] {
        &self.basis
    }

    pub fn g_lower(&self, a: usize, b: usize) -> f64 {
        self.g_lower[a * self.len() + b]
    }

    pub fn g_upper(&self, a: usize, b: usize) -> f64 {
        self.g_upper[a * self.len() + b]
    }

    /// `Ω_abc`.
    pub fn omega_lower(&self, a: usize, b: usize, c: usize) -> f64 {
        let n = self.len();
        self.omega_lower[(a * n + b) * n + c]
    }

    /// `Ω^a_bc`.
    pub fn omega_mixed(&self, a: usize, b: usize, c: usize) -> f64 {
        let n = self.len();
        self.omega_mixed[(a * n + b) * n + c]
    }

    /// Adds `delta` to `Ω^a_bc` only, breaking the tensor on purpose.
    pub fn perturb_mixed(&mut self, a: usize, b: usize, c: usize, delta: f64) {
        let n = self.len();
        self.omega_mixed[(a * n + b) * n + c] += delta;
    }

    /// `max |g_ab g^bc − δ_a^c|`.
    pub fn metric_residual(&self) -> f64 {
        let n = self.len();
        (0..n)
            .cartesian_product(0..n)
            .map(|(a, c)| {
                let s: f64 = (0..n)
                    .map(|b| self.g_lower(a, b) * self.g_upper(b, c))
                    .sum();
                (s - if a == c { 1.0 } else { 0.0 }).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// `max |Σ_c (Ω^a_bc Ω^c_de + Ω^a_ec Ω^c_bd + Ω^a_dc Ω^c_eb)|`.
pub fn jacobi_residual(t: &StructureTensor) -> f64 {
    let n = t.len();
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for (b, d, e) in itertools::iproduct!(0..n, 0..n, 0..n) {
            let s: f64 = (0..n)
                .map(|c| {
                    t.omega_mixed(a, b, c) * t.omega_mixed(c, d, e)
                        + t.omega_mixed(a, e, c) * t.omega_mixed(c, b, d)
                        + t.omega_mixed(a, d, c) * t.omega_mixed(c, e, b)
                })
                .sum();
            worst = worst.max(s.abs());
        }
    }
    worst
}

/// Largest violation of total antisymmetry of `Ω_abc` and of
/// `Ω^a_cb = −Ω^a_bc`.
pub fn antisymmetry_residual(t: &StructureTensor) -> f64 {
    let n = t.len();
    let mut worst: f64 = 0.0;
    for (a, b, c) in itertools::iproduct!(0..n, 0..n, 0..n) {
        let idx = [a, b, c];
        let w = t.omega_lower(a, b, c);
        for perm in (0..3).permutations(3) {
            let sign = permutation_sign(&perm);
            let v = t.omega_lower(idx[perm[0]], idx[perm[1]], idx[perm[2]]);
            worst = worst.max((v - sign * w).abs());
        }
        worst = worst.max((t.omega_mixed(a, b, c) + t.omega_mixed(a, c, b)).abs());
    }
    worst
}

/// `(−1)^{inversions}`.
pub(crate) fn permutation_sign(perm: &[usize]) -> f64 {
    let inversions = perm
        .iter()
        .tuple_combinations()
        .filter(|(x, y)| x > y)
        .count();
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `Ω_abc f_a g_b h_c` with `f_a = Tr(T_a ∇F)` etc.
pub fn bracket_via_tensor<F, G, H>(
    f: &F,
    g: &G,
    h: &H,
    rho: &DensityMatrix,
    t: &StructureTensor,
) -> Result<f64>
where
    F: Functional + ?Sized,
    G: Functional + ?Sized,
    H: Functional + ?Sized,
{
    if rho.dim() != t.dim() {
        return Err(Error::DimensionMismatch {
            expected: t.dim(),
            found: rho.dim(),
        });
    }
    let fa = components(t.basis(), f.gradient(rho)?.as_matrix());
    let gb = components(t.basis(), g.gradient(rho)?.as_matrix());
    let hc = components(t.basis(), h.gradient(rho)?.as_matrix());
    let n = t.len();
    Ok(itertools::iproduct!(0..n, 0..n, 0..n)
        .map(|(a, b, c)| t.omega_lower(a, b, c) * fa[a] * gb[b] * hc[c])
        .sum())
}

/// `g^{a₁…aₙ} = Re Tr(T_{a₁} ⋯ T_{aₙ})` over [`gell_mann_basis`].
#[derive(Clone, Debug, PartialEq)]
pub struct CyclicTraceTensor {
    d: usize,
    n: usize,
    basis: Vec<HermitianMatrix>,
    entries: Vec<f64>,
}

pub fn cyclic_trace_tensor(d: usize, n: usize) -> Result<CyclicTraceTensor> {
    if !(1..=3).contains(&d) || !(1..=4).contains(&n) {
        return Err(Error::Domain(alloc::format!(
            "cyclic trace tensor needs d <= 3 and 1 <= n <= 4, got d={d}, n={n}"
        )));
    }
    let basis = gell_mann_basis(d);
    let entries = (0..n)
        .map(|_| 0..basis.len())
        .multi_cartesian_product()
        .map(|idx| {
            let prod = idx[1..]
                .iter()
                .fold(basis[idx[0]].as_matrix().clone(), |acc, &i| {
                    &acc * basis[i].as_matrix()
                });
            prod.trace().re
        })
        .collect();
    Ok(CyclicTraceTensor {
        d,
        n,
        basis,
        entries,
    })
}

impl CyclicTraceTensor {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn entry(&self, idx: &[usize]) -> f64 {
        assert_eq!(idx.len(), self.n, "index arity");
        let m = self.basis.len();
        self.entries[idx.iter().fold(0, |acc, &i| acc * m + i)]
    }

    /// Largest change of an entry under a cyclic shift of its indices.
    pub fn cyclic_residual(&self) -> f64 {
        let m = self.basis.len();
        (0..self.n)
            .map(|_| 0..m)
            .multi_cartesian_product()
            .map(|idx| {
                let mut shifted = idx.clone();
                shifted.rotate_left(1);
                (self.entry(&idx) - self.entry(&shifted)).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// `g^{a₁…aₙ} ρ_{a₁}⋯ρ_{aₙ}` with `ρ_a = Tr(T_a ρ)`; equals `Tr ρⁿ`.
pub fn casimir_via_tensor(t: &CyclicTraceTensor, rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != t.d {
        return Err(Error::DimensionMismatch {
            expected: t.d,
            found: rho.dim(),
        });
    }
    let x = components(&t.basis, rho);
    let m = x.len();
    Ok((0..t.n)
        .map(|_| 0..m)
        .multi_cartesian_product()
        .zip(&t.entries)
        .map(|(idx, e)| e * idx.iter().map(|&i| x[i]).product::<f64>())
        .sum())
}
