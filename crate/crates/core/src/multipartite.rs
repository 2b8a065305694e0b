//! Tensor-product state spaces and subsystem no-signaling probes.
//!
//! Slots are ordered as in the Kronecker product: slot 0 is the most
//! significant factor of a composite index.

use alloc::vec;
use alloc::vec::Vec;

use itertools::Itertools;

use crate::brackets::{lie_nambu, permutation_sign};
use crate::functionals::{
    linear_observable, quadratic_observable, renyi_a, Functional, FunctionalKind, LinearObservable,
};
use crate::matrix::{
    random_density_with, random_hermitian_with, seeded_rng, ComplexMatrix, DensityMatrix,
    HermitianMatrix, SeededRng,
};
use crate::{Error, Result, C64};

/// A density matrix on `⊗ᵢ C^{dᵢ}`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultipartiteState {
    dims: Vec<usize>,
    rho: DensityMatrix,
}

impl MultipartiteState {
    pub fn new(dims: Vec<usize>, rho: DensityMatrix) -> Result<Self> {
        let total: usize = dims.iter().product();
        if dims.is_empty() || dims.contains(&0) || total != rho.dim() {
            return Err(Error::DimensionMismatch {
                expected: total,
                found: rho.dim(),
            });
        }
        Ok(MultipartiteState { dims, rho })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn rho(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn into_rho(self) -> DensityMatrix {
        self.rho
    }
}

/// `ρ_I ⊗ ρ_II`.
pub fn tensor_product(rho_i: &DensityMatrix, rho_ii: &DensityMatrix) -> MultipartiteState {
    let rho = DensityMatrix::from_hermitian_unchecked(rho_i.as_hermitian().kron(rho_ii));
    MultipartiteState {
        dims: vec![rho_i.dim(), rho_ii.dim()],
        rho,
    }
}

/// Splits composite indices into the kept part and the traced part.
struct Split {
    dims: Vec<usize>,
    keep: Vec<usize>,
    rest: Vec<usize>,
}

impl Split {
    fn new(dims: &[usize], keep: &[usize]) -> Result<Self> {
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.is_empty() {
            return Err(Error::Domain("at least one slot must be kept".into()));
        }
        if let Some(&bad) = keep.iter().find(|&&s| s >= dims.len()) {
            return Err(Error::Domain(alloc::format!(
                "slot {bad} out of range for {} slots",
                dims.len()
            )));
        }
        let rest = (0..dims.len()).filter(|s| !keep.contains(s)).collect();
        Ok(Split {
            dims: dims.to_vec(),
            keep,
            rest,
        })
    }

    fn size(&self, slots: &[usize]) -> usize {
        slots.iter().map(|&s| self.dims[s]).product()
    }

    /// Composite index from the kept index `k` and traced index `r`.
    fn join(&self, k: usize, r: usize) -> usize {
        let mut digits = vec![0; self.dims.len()];
        let mut spread = |slots: &[usize], mut x: usize| {
            for &s in slots.iter().rev() {
                digits[s] = x % self.dims[s];
                x /= self.dims[s];
            }
        };
        spread(&self.keep, k);
        spread(&self.rest, r);
        digits
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&d, &n)| acc * n + d)
    }
}

fn trace_out(m: &ComplexMatrix, split: &Split) -> ComplexMatrix {
    let (nk, nr) = (split.size(&split.keep), split.size(&split.rest));
    ComplexMatrix::from_fn(nk, |i, j| {
        (0..nr)
            .map(|r| m[(split.join(i, r), split.join(j, r))])
            .sum()
    })
}

fn embed(a: &ComplexMatrix, split: &Split) -> ComplexMatrix {
    let (nk, nr) = (split.size(&split.keep), split.size(&split.rest));
    let mut out = ComplexMatrix::zeros(nk * nr);
    for (i, j, r) in itertools::iproduct!(0..nk, 0..nk, 0..nr) {
        out[(split.join(i, r), split.join(j, r))] = a[(i, j)];
    }
    out
}

/// Reduced density matrix on the slots in `keep`.
pub fn partial_trace(s: &MultipartiteState, keep: &[usize]) -> Result<DensityMatrix> {
    reduce(&s.rho, &s.dims, keep)
}

fn reduce(rho: &DensityMatrix, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
    let split = Split::new(dims, keep)?;
    Ok(DensityMatrix::from_hermitian_unchecked(
        crate::matrix::hermitize(&trace_out(rho, &split)),
    ))
}

/// `1 ⊗ … ⊗ Â ⊗ … ⊗ 1` with `Â` on `slot`.
pub fn lift_local(a: &HermitianMatrix, slot: usize, dims: &[usize]) -> Result<HermitianMatrix> {
    lift_slots(a, &[slot], dims)
}

fn lift_slots(a: &HermitianMatrix, keep: &[usize], dims: &[usize]) -> Result<HermitianMatrix> {
    let split = Split::new(dims, keep)?;
    let expected = split.size(&split.keep);
    if a.dim() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: a.dim(),
        });
    }
    Ok(crate::matrix::hermitize(&embed(a, &split)))
}

/// `H = Tr((Ĥ_I ⊗ 1 + 1 ⊗ Ĥ_II) ρ)` for two non-interacting slots.
pub fn split_hamiltonian(
    h_i: &HermitianMatrix,
    h_ii: &HermitianMatrix,
    dims: (usize, usize),
) -> Result<LinearObservable> {
    let dims = [dims.0, dims.1];
    Ok(linear_observable(
        lift_local(h_i, 0, &dims)?.add(&lift_local(h_ii, 1, &dims)?),
    ))
}

/// `F[ρ] = f[Tr_rest ρ]`, a functional of the marginal on `keep`.
/// Its gradient is `∇f` lifted back to the full space.
pub struct LocalFunctional<F> {
    inner: F,
    dims: Vec<usize>,
    keep: Vec<usize>,
}

pub fn local_functional<F: Functional>(
    inner: F,
    dims: &[usize],
    keep: &[usize],
) -> Result<LocalFunctional<F>> {
    Split::new(dims, keep)?;
    Ok(LocalFunctional {
        inner,
        dims: dims.to_vec(),
        keep: keep.to_vec(),
    })
}

impl<F: Functional> LocalFunctional<F> {
    fn marginal(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let total: usize = self.dims.iter().product();
        if rho.dim() != total {
            return Err(Error::DimensionMismatch {
                expected: total,
                found: rho.dim(),
            });
        }
        reduce(rho, &self.dims, &self.keep)
    }
}

impl<F: Functional> Functional for LocalFunctional<F> {
    fn kind(&self) -> FunctionalKind {
        FunctionalKind::Composite
    }
    fn value(&self, rho: &DensityMatrix) -> Result<f64> {
        self.inner.value(&self.marginal(rho)?)
    }
    fn gradient(&self, rho: &DensityMatrix) -> Result<HermitianMatrix> {
        let g = self.inner.gradient(&self.marginal(rho)?)?;
        lift_slots(&g, &self.keep, &self.dims)
    }
}

/// Seeded observable on one slot: quadratic `Tr((Âρ_slot)²)` or linear.
fn local_probe(
    rng: &mut SeededRng,
    dims: &[usize],
    slot: usize,
    quadratic: bool,
) -> Result<LocalFunctional<alloc::boxed::Box<dyn Functional>>> {
    let a = random_hermitian_with(rng, dims[slot]);
    let inner: alloc::boxed::Box<dyn Functional> = if quadratic {
        alloc::boxed::Box::new(quadratic_observable(a))
    } else {
        alloc::boxed::Box::new(linear_observable(a))
    };
    local_functional(inner, dims, &[slot])
}

fn global_probe(
    rng: &mut SeededRng,
    d: usize,
    nonlinear: bool,
) -> Result<alloc::boxed::Box<dyn Functional>> {
    let a = random_hermitian_with(rng, d);
    Ok(if nonlinear {
        alloc::boxed::Box::new(renyi_a(3.0)?)
    } else {
        alloc::boxed::Box::new(linear_observable(a))
    })
}

fn bracket_probe(
    dims: (usize, usize),
    trials: usize,
    seed: u64,
    second_slot: usize,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::Domain("trials must be >= 1".into()));
    }
    let slots = [dims.0, dims.1];
    let d = dims.0 * dims.1;
    let mut rng = seeded_rng(seed);
    let mut worst: f64 = 0.0;
    for t in 0..trials {
        let f = local_probe(&mut rng, &slots, 0, t % 2 == 0)?;
        let g = local_probe(&mut rng, &slots, second_slot, (t / 2) % 2 == 0)?;
        let k = global_probe(&mut rng, d, (t / 4) % 2 == 0)?;
        let rho = random_density_with(&mut rng, d, 1 + t % d)?;
        worst = worst.max(lie_nambu(&f, &g, &k, &rho)?.abs());
    }
    Ok(worst)
}

/// `max |[F^I, G^II, K](ρ)|` over seeded local observables `F^I`, `G^II`
/// (quadratic and linear in the marginals), global `K` (linear or
/// `S_3`) and random, generically entangled states.
pub fn nosignal_bracket_test(dims: (usize, usize), trials: usize, seed: u64) -> Result<f64> {
    bracket_probe(dims, trials, seed, 1)
}

/// Control for [`nosignal_bracket_test`] with both observables on slot I.
pub fn overlapping_bracket_control(dims: (usize, usize), trials: usize, seed: u64) -> Result<f64> {
    bracket_probe(dims, trials, seed, 0)
}

/// Number of seeded observable/state pairs in [`subsystem_generator_test`].
pub const GENERATOR_TRIALS: usize = 20;

/// `max |[F^I, H, S] − [F^I, H^I, S]|` for `H = H^I + H^II`.
pub fn subsystem_generator_test(
    dims: (usize, usize),
    h_i: &HermitianMatrix,
    h_ii: &HermitianMatrix,
    s: &dyn Functional,
    seed: u64,
) -> Result<f64> {
    interacting_generator_gap(dims, h_i, h_ii, None, s, seed)
}

/// [`subsystem_generator_test`] with an optional coupling `V` added to the
/// total Hamiltonian; a nonlocal `V` is the control case.
pub fn interacting_generator_gap(
    dims: (usize, usize),
    h_i: &HermitianMatrix,
    h_ii: &HermitianMatrix,
    coupling: Option<&HermitianMatrix>,
    s: &dyn Functional,
    seed: u64,
) -> Result<f64> {
    let slots = [dims.0, dims.1];
    let d = dims.0 * dims.1;
    let mut total = split_hamiltonian(h_i, h_ii, dims)?.operator().clone();
    if let Some(v) = coupling {
        if v.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: v.dim(),
            });
        }
        total = total.add(v);
    }
    let total = linear_observable(total);
    let local = linear_observable(lift_local(h_i, 0, &slots)?);
    let mut rng = seeded_rng(seed);
    let mut worst: f64 = 0.0;
    for t in 0..GENERATOR_TRIALS {
        let f = local_probe(&mut rng, &slots, 0, t % 2 == 0)?;
        let rho = random_density_with(&mut rng, d, 1 + t % d)?;
        let gap = lie_nambu(&f, &total, s, &rho)? - lie_nambu(&f, &local, s, &rho)?;
        worst = worst.max(gap.abs());
    }
    Ok(worst)
}

/// Dense complex tensor with `N` indices, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    dims: Vec<usize>,
    data: Vec<C64>,
}

impl Tensor {
    pub fn new(dims: Vec<usize>, data: Vec<C64>) -> Result<Self> {
        let n: usize = dims.iter().product();
        if data.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: data.len(),
            });
        }
        Ok(Tensor { dims, data })
    }

    pub fn zeros(dims: Vec<usize>) -> Self {
        let n = dims.iter().product();
        Tensor {
            dims,
            data: vec![C64::new(0.0, 0.0); n],
        }
    }

    /// `v₁ ⊗ … ⊗ v_N`.
    pub fn product(factors: &[Vec<C64>]) -> Self {
        let dims = factors.iter().map(Vec::len).collect();
        let data = factors.iter().fold(vec![C64::new(1.0, 0.0)], |acc, v| {
            acc.iter()
                .flat_map(|a| v.iter().map(move |b| a * b))
                .collect()
        });
        Tensor { dims, data }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    fn offset(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.dims)
            .fold(0, |acc, (&i, &n)| acc * n + i)
    }

    pub fn get(&self, idx: &[usize]) -> C64 {
        self.data[self.offset(idx)]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// `(1/N!) Σ_π sgn(π) Ψ_{i_π(1)…i_π(N)}`.
pub fn antisymmetrize(psi: &Tensor) -> Result<Tensor> {
    let n = psi.dims.len();
    if let Some(&d0) = psi.dims.first() {
        if psi.dims.iter().any(|&d| d != d0) {
            return Err(Error::Domain(
                "antisymmetrization needs equal slot dimensions".into(),
            ));
        }
    }
    let perms: Vec<(Vec<usize>, f64)> = (0..n)
        .permutations(n)
        .map(|p| {
            let s = permutation_sign(&p);
            (p, s)
        })
        .collect();
    let norm = 1.0 / perms.len() as f64;
    let mut out = Tensor::zeros(psi.dims.clone());
    for idx in psi.dims.iter().map(|&d| 0..d).multi_cartesian_product() {
        let sum: C64 = perms
            .iter()
            .map(|(p, s)| {
                let permuted: Vec<usize> = p.iter().map(|&k| idx[k]).collect();
                psi.get(&permuted) * *s
            })
            .sum();
        let at = out.offset(&idx);
        out.data[at] = sum * norm;
    }
    Ok(out)
}
