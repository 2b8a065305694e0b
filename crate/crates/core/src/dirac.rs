//! The free Dirac equation in 2-spinor form, in momentum space.
//!
//! Conventions:
//!
//! - Metric `η = diag(1, −1, −1, −1)`; Levi-Civita `e_{0123} = −1`.
//! - Infeld-van der Waerden symbols `g_a^{AA'} = (1, σ_x, σ_y, σ_z)/√2`.
//! - `ε_{AB} = ε^{AB}` with `ε_{01} = 1`; `κ^A = ε^{AB} κ_B`, `κ_B = κ^A ε_{AB}`.
//! - A mode is a plane wave `e^{−ik·x}` carrying `(ψ^A, ξ_{A'})`, so
//!   `P_a = i∇_a` acts as `k_a`.
//!
//! A slicing vector `n` splits `k = E n + p` with `p ⟂ n`. The mode matrix
//! `h` satisfies `E Ψ = h Ψ`. It is self-adjoint for the norm
//! `‖Ψ‖² = n^{AA'}(ψ_A ψ̄_{A'} + ξ̄_A ξ_{A'}) = Ψ† G Ψ`, and in the rest frame
//! `G = 1/√2` so `h` is Hermitian.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::brackets::permutation_sign;
use crate::matrix::{hermitize, ComplexMatrix, HermitianMatrix};
use crate::{Error, Result, C64};

const ETA: [f64; 4] = [1.0, -1.0, -1.0, -1.0];
const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn eps() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[alloc::vec![ZERO, ONE], alloc::vec![-ONE, ZERO]]).expect("2x2")
}

/// `M_{BB'} = M^{AA'} ε_{AB} ε_{A'B'}`.
fn lower_both(m: &ComplexMatrix) -> ComplexMatrix {
    let e = eps();
    &(&e.transpose() * m) * &e
}

/// A contravariant four-vector `(t, x, y, z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourVector(pub [f64; 4]);

impl FourVector {
    pub fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        FourVector([t, x, y, z])
    }

    /// `(1, 0, 0, 0)`.
    pub fn rest() -> Self {
        FourVector([1.0, 0.0, 0.0, 0.0])
    }

    /// `(cosh η, 0, 0, sinh η)`.
    pub fn boost_z(rapidity: f64) -> Self {
        FourVector([rapidity.cosh(), 0.0, 0.0, rapidity.sinh()])
    }

    pub fn dot(&self, other: &FourVector) -> f64 {
        (0..4).map(|a| ETA[a] * self.0[a] * other.0[a]).sum()
    }

    pub fn lower(&self) -> [f64; 4] {
        core::array::from_fn(|a| ETA[a] * self.0[a])
    }

    fn check_slicing(&self) -> Result<()> {
        let norm = self.dot(self);
        if !(self.0[0] > 0.0) || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(alloc::format!(
                "slicing vector must be future-pointing with n.n = 1, got n.n = {norm}"
            )));
        }
        Ok(())
    }
}

/// `g_a^{AA'}` for `a = 0..3`, stored as 2×2 matrices indexed `[A][A']`.
#[derive(Clone, Debug, PartialEq)]
pub struct IvwSymbols {
    g: [ComplexMatrix; 4],
}

pub fn ivw_symbols() -> IvwSymbols {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let (z, i) = (ZERO, C64::new(0.0, s));
    let rows = [
        [[c(s), z], [z, c(s)]],
        [[z, c(s)], [c(s), z]],
        [[z, -i], [i, z]],
        [[c(s), z], [z, c(-s)]],
    ];
    IvwSymbols {
        g: rows.map(|r| ComplexMatrix::from_rows(&[r[0].to_vec(), r[1].to_vec()]).expect("2x2")),
    }
}

impl IvwSymbols {
    /// `g_a^{AA'}`.
    pub fn lower_world(&self, a: usize) -> &ComplexMatrix {
        &self.g[a]
    }

    /// `g^{aAA'}`.
    pub fn upper_world(&self, a: usize) -> ComplexMatrix {
        self.g[a].scale_real(ETA[a])
    }

    /// `g_{aAA'}`.
    pub fn lower_world_lower_spinor(&self, a: usize) -> ComplexMatrix {
        lower_both(&self.g[a])
    }

    /// `g^a_{AA'}`.
    pub fn upper_world_lower_spinor(&self, a: usize) -> ComplexMatrix {
        lower_both(&self.g[a]).scale_real(ETA[a])
    }

    /// `v^{AA'} = v^a g_a^{AA'}`.
    pub fn spinor_upper(&self, v: &FourVector) -> ComplexMatrix {
        (0..4).fold(ComplexMatrix::zeros(2), |acc, a| {
            &acc + &self.g[a].scale_real(v.0[a])
        })
    }

    /// `v_{AA'} = v^a g_{aAA'}`.
    pub fn spinor_lower(&self, v: &FourVector) -> ComplexMatrix {
        lower_both(&self.spinor_upper(v))
    }

    /// `g^a_{XA'} g^{bYA'}`, indexed `[X][Y]`.
    fn unprimed_product(&self, a: usize, b: usize) -> ComplexMatrix {
        &self.upper_world_lower_spinor(a) * &self.upper_world(b).transpose()
    }

    /// `g^a_{AX'} g^{bAY'}`, indexed `[X'][Y']`.
    fn primed_product(&self, a: usize, b: usize) -> ComplexMatrix {
        &self.upper_world_lower_spinor(a).transpose() * &self.upper_world(b)
    }
}

/// Lorentz generators on `(½, 0)` and `(0, ½)`: `σ^{ab}{}_X{}^Y` and
/// `σ̄^{ab}{}_{X'}{}^{Y'}`, upper world indices, stored at `a·4 + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaGenerators {
    sigma: Vec<ComplexMatrix>,
    sigma_bar: Vec<ComplexMatrix>,
}

/// `σ^{ab} = (1/2i)(g^a_{XA'} g^{bYA'} − (a ↔ b))`, and `σ̄` likewise.
pub fn sigma_generators() -> SigmaGenerators {
    let g = ivw_symbols();
    let half_i = C64::new(0.0, -0.5);
    let build = |prod: &dyn Fn(usize, usize) -> ComplexMatrix| {
        (0..16)
            .map(|ab| (&prod(ab / 4, ab % 4) - &prod(ab % 4, ab / 4)).scale(half_i))
            .collect()
    };
    SigmaGenerators {
        sigma: build(&|a, b| g.unprimed_product(a, b)),
        sigma_bar: build(&|a, b| g.primed_product(a, b)),
    }
}

/// The same generators from their spinor form
/// `σ_{AA'BB'XY} = (1/2i) ε_{A'B'}(ε_{AX}ε_{BY} + ε_{BX}ε_{AY})` and its
/// conjugate, mapped to world indices with `g_a^{AA'}`.
pub fn sigma_generators_spinor_form() -> SigmaGenerators {
    let g = ivw_symbols();
    let e = eps();
    let k = C64::new(0.0, -0.5);
    let spinor = |a_: usize, ap: usize, b_: usize, bp: usize, x: usize, y: usize| {
        e[(ap, bp)] * (e[(a_, x)] * e[(b_, y)] + e[(b_, x)] * e[(a_, y)]) * k
    };
    let spinor_bar = |a_: usize, ap: usize, b_: usize, bp: usize, x: usize, y: usize| {
        e[(a_, b_)] * (e[(ap, x)] * e[(bp, y)] + e[(bp, x)] * e[(ap, y)]) * k
    };
    let to_world =
        |f: &dyn Fn(usize, usize, usize, usize, usize, usize) -> C64| -> Vec<ComplexMatrix> {
            (0..16)
                .map(|ab| {
                    let (a, b) = (ab / 4, ab % 4);
                    // σ_{abXZ}, then raise Z and both world indices.
                    let lower = ComplexMatrix::from_fn(2, |x, z| {
                        itertools::iproduct!(0..2, 0..2, 0..2, 0..2)
                            .map(|(a_, ap, b_, bp)| {
                                g.g[a][(a_, ap)] * g.g[b][(b_, bp)] * f(a_, ap, b_, bp, x, z)
                            })
                            .sum()
                    });
                    (&lower * &e.transpose()).scale_real(ETA[a] * ETA[b])
                })
                .collect()
        };
    SigmaGenerators {
        sigma: to_world(&spinor),
        sigma_bar: to_world(&spinor_bar),
    }
}

/// `e_{abcd}` with `e_{0123} = −1`.
fn levi_civita(idx: [usize; 4]) -> f64 {
    if (0..4).all(|i| (i + 1..4).all(|j| idx[i] != idx[j])) {
        -permutation_sign(&idx)
    } else {
        0.0
    }
}

impl SigmaGenerators {
    /// `σ^{ab}`.
    pub fn sigma(&self, a: usize, b: usize) -> &ComplexMatrix {
        &self.sigma[a * 4 + b]
    }

    pub fn sigma_bar(&self, a: usize, b: usize) -> &ComplexMatrix {
        &self.sigma_bar[a * 4 + b]
    }

    /// `σ_{ab}`.
    pub fn sigma_lower(&self, a: usize, b: usize) -> ComplexMatrix {
        self.sigma(a, b).scale_real(ETA[a] * ETA[b])
    }

    pub fn sigma_bar_lower(&self, a: usize, b: usize) -> ComplexMatrix {
        self.sigma_bar(a, b).scale_real(ETA[a] * ETA[b])
    }

    fn dual_of(table: &[ComplexMatrix], a: usize, b: usize) -> ComplexMatrix {
        itertools::iproduct!(0..4, 0..4).fold(ComplexMatrix::zeros(2), |acc, (c_, d)| {
            &acc + &table[c_ * 4 + d].scale_real(0.5 * levi_civita([a, b, c_, d]))
        })
    }

    /// `*σ_{ab} = ½ e_{abcd} σ^{cd}`.
    pub fn dual(&self, a: usize, b: usize) -> ComplexMatrix {
        Self::dual_of(&self.sigma, a, b)
    }

    pub fn dual_bar(&self, a: usize, b: usize) -> ComplexMatrix {
        Self::dual_of(&self.sigma_bar, a, b)
    }

    pub fn max_difference(&self, other: &SigmaGenerators) -> f64 {
        self.sigma
            .iter()
            .zip(&other.sigma)
            .chain(self.sigma_bar.iter().zip(&other.sigma_bar))
            .map(|(x, y)| (x - y).max_abs())
            .fold(0.0, f64::max)
    }
}

/// Componentwise residuals of the spinor identities.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct IdentityResiduals {
    /// `g^a_{XA'}g^{bYA'} + (a↔b) = g^{ab} δ_X^Y`.
    pub iw1: f64,
    pub iw2: f64,
    /// `g^a_{XA'}g^{bYA'} = ½ g^{ab} δ_X^Y + i σ^{ab}`.
    pub id1: f64,
    pub id2: f64,
    /// Spinor form against the product construction.
    pub gs1: f64,
    pub gs2: f64,
    /// `*σ = −iσ`.
    pub self_dual: f64,
    /// `*σ̄ = +iσ̄`.
    pub anti_self_dual: f64,
    pub antisymmetry: f64,
    /// `n_{AA'} n^{BA'} = ½ δ_A^B` for `n = (1, 0, 0, 0)`.
    pub slicing: f64,
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        [
            self.iw1,
            self.iw2,
            self.id1,
            self.id2,
            self.gs1,
            self.gs2,
            self.self_dual,
            self.anti_self_dual,
            self.antisymmetry,
            self.slicing,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn identity_residuals() -> IdentityResiduals {
    let g = ivw_symbols();
    let products = sigma_generators();
    let spinor = sigma_generators_spinor_form();
    let id2 = ComplexMatrix::identity(2);
    let pairs = || itertools::iproduct!(0..4, 0..4);
    let metric = |a: usize, b: usize| if a == b { ETA[a] } else { 0.0 };
    let worst = |f: &dyn Fn(usize, usize) -> f64| pairs().map(|(a, b)| f(a, b)).fold(0.0, f64::max);
    let i = C64::new(0.0, 1.0);

    let mut r = IdentityResiduals {
        iw1: worst(&|a, b| {
            (&(&g.unprimed_product(a, b) + &g.unprimed_product(b, a))
                - &id2.scale_real(metric(a, b)))
                .max_abs()
        }),
        iw2: worst(&|a, b| {
            (&(&g.primed_product(a, b) + &g.primed_product(b, a)) - &id2.scale_real(metric(a, b)))
                .max_abs()
        }),
        id1: worst(&|a, b| {
            let rhs = &id2.scale_real(0.5 * metric(a, b)) + &products.sigma(a, b).scale(i);
            (&g.unprimed_product(a, b) - &rhs).max_abs()
        }),
        id2: worst(&|a, b| {
            let rhs = &id2.scale_real(0.5 * metric(a, b)) + &products.sigma_bar(a, b).scale(i);
            (&g.primed_product(a, b) - &rhs).max_abs()
        }),
        self_dual: worst(&|a, b| {
            (&products.dual(a, b) + &products.sigma_lower(a, b).scale(i)).max_abs()
        }),
        anti_self_dual: worst(&|a, b| {
            (&products.dual_bar(a, b) - &products.sigma_bar_lower(a, b).scale(i)).max_abs()
        }),
        antisymmetry: worst(&|a, b| {
            (products.sigma(a, b) + products.sigma(b, a))
                .max_abs()
                .max((products.sigma_bar(a, b) + products.sigma_bar(b, a)).max_abs())
        }),
        ..IdentityResiduals::default()
    };
    let half_diff = |x: &ComplexMatrix, y: &ComplexMatrix| {
        x.as_slice()
            .iter()
            .zip(y.as_slice())
            .map(|(p, q)| (p - q).norm())
            .fold(0.0, f64::max)
    };
    r.gs1 = (0..16)
        .map(|ab| half_diff(&products.sigma[ab], &spinor.sigma[ab]))
        .fold(0.0, f64::max);
    r.gs2 = (0..16)
        .map(|ab| half_diff(&products.sigma_bar[ab], &spinor.sigma_bar[ab]))
        .fold(0.0, f64::max);
    let n = FourVector::rest();
    let nn = &g.spinor_lower(&n) * &g.spinor_upper(&n).transpose();
    r.slicing = (&nn - &id2.scale_real(0.5)).max_abs();
    r
}

/// A plane-wave mode with spatial wave vector `k` in the slicing frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinorMode {
    pub k: [f64; 3],
    /// `ψ^A`.
    pub psi: [C64; 2],
    /// `ξ_{A'}`.
    pub xi: [C64; 2],
}

impl SpinorMode {
    pub fn new(k: [f64; 3], psi: [C64; 2], xi: [C64; 2]) -> Self {
        SpinorMode { k, psi, xi }
    }

    /// `(ψ^0, ψ^1, ξ_0', ξ_1')`.
    pub fn to_vector(&self) -> [C64; 4] {
        [self.psi[0], self.psi[1], self.xi[0], self.xi[1]]
    }

    pub fn from_vector(k: [f64; 3], v: &[C64]) -> Self {
        SpinorMode {
            k,
            psi: [v[0], v[1]],
            xi: [v[2], v[3]],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_vector()
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// `p = (s, k⃗ + s/(1 + n⁰) n⃗)` with `s = n⃗·k⃗`: the boost of `(0, k⃗)` from
/// the rest frame to the frame of `n`. Satisfies `p·n = 0`, `p·p = −|k⃗|²`.
fn spatial_momentum(k: &[f64; 3], n: &FourVector) -> FourVector {
    let s: f64 = (0..3).map(|i| n.0[i + 1] * k[i]).sum();
    let f = s / (1.0 + n.0[0]);
    FourVector([s, k[0] + f * n.0[1], k[1] + f * n.0[2], k[2] + f * n.0[3]])
}

/// Residual of `k_{AA'}ψ^A = (m/√2) ξ_{A'}` and `k^{AA'}ξ_{A'} = (m/√2) ψ^A`
/// for `k = (E, k⃗)`.
pub fn dirac_residual(mode: &SpinorMode, energy: f64, mass: f64) -> f64 {
    dirac_residual_in_frame(mode, energy, mass, &FourVector::rest())
}

/// [`dirac_residual`] with `k = E n + p(k⃗, n)`.
pub fn dirac_residual_in_frame(mode: &SpinorMode, energy: f64, mass: f64, n: &FourVector) -> f64 {
    let g = ivw_symbols();
    let p = spatial_momentum(&mode.k, n);
    let k4 = FourVector(core::array::from_fn(|a| energy * n.0[a] + p.0[a]));
    let (kl, ku) = (g.spinor_lower(&k4), g.spinor_upper(&k4));
    let m = mass * core::f64::consts::FRAC_1_SQRT_2;
    let r1 = (0..2).map(|ap| {
        ((0..2).map(|a| kl[(a, ap)] * mode.psi[a]).sum::<C64>() - mode.xi[ap] * m).norm()
    });
    let r2 = (0..2).map(|a| {
        ((0..2).map(|ap| ku[(a, ap)] * mode.xi[ap]).sum::<C64>() - mode.psi[a] * m).norm()
    });
    r1.chain(r2).fold(0.0, f64::max)
}

/// Mode matrix `h` with `EΨ = hΨ` and the norm Gram matrix `G`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiracHamiltonian {
    h: ComplexMatrix,
    gram: HermitianMatrix,
}

/// `h(k⃗)` read off from the `n`-sliced equations with `∇ → −ik⃗`.
///
/// Blocks on `(ψ^A, ξ_{A'})`:
/// `Eψ^B = −2 n^{BA'} p_{AA'} ψ^A + √2 m n^{BA'} ξ_{A'}` and
/// `Eξ_{B'} = −2 n_{AB'} p^{AA'} ξ_{A'} + √2 m n_{AB'} ψ^A`.
pub fn dirac_hamiltonian(k: [f64; 3], mass: f64, n: &FourVector) -> Result<DiracHamiltonian> {
    n.check_slicing()?;
    if !(mass >= 0.0) || !mass.is_finite() || k.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("mass must be >= 0 and k finite".into()));
    }
    let g = ivw_symbols();
    let p = spatial_momentum(&k, n);
    let (pl, pu) = (g.spinor_lower(&p), g.spinor_upper(&p));
    let (nl, nu) = (g.spinor_lower(n), g.spinor_upper(n));
    let rm = core::f64::consts::SQRT_2 * mass;
    let psi_psi = (&nu * &pl.transpose()).scale_real(-2.0);
    let xi_xi = (&nl.transpose() * &pu).scale_real(-2.0);
    let mut h = ComplexMatrix::zeros(4);
    for (i, j) in itertools::iproduct!(0..2, 0..2) {
        h[(i, j)] = psi_psi[(i, j)];
        h[(i, j + 2)] = nu[(i, j)] * rm;
        h[(i + 2, j + 2)] = xi_xi[(i, j)];
        h[(i + 2, j)] = nl[(j, i)] * rm;
    }
    // ψ_A = ψ^B ε_{BA}, so the ψ block of the norm is εᵀᵀ Nᵀ εᵀ.
    let e = eps();
    let psi_block = &(&e * &nu.transpose()) * &e.transpose();
    let mut gram = ComplexMatrix::zeros(4);
    for (i, j) in itertools::iproduct!(0..2, 0..2) {
        gram[(i, j)] = psi_block[(i, j)];
        gram[(i + 2, j + 2)] = nu[(i, j)];
    }
    Ok(DiracHamiltonian {
        h,
        gram: hermitize(&gram),
    })
}

/// Eigenvalues (ascending) and `G`-orthonormal eigenmodes (columns).
#[derive(Clone, Debug, PartialEq)]
pub struct ModeSpectrum {
    pub energies: Vec<f64>,
    pub modes: ComplexMatrix,
}

impl DiracHamiltonian {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.h
    }

    pub fn gram(&self) -> &HermitianMatrix {
        &self.gram
    }

    /// `‖G h − h† G‖_max`.
    pub fn self_adjointness_defect(&self) -> f64 {
        (&(self.gram.as_matrix() * &self.h) - &(&self.h.adjoint() * self.gram.as_matrix()))
            .max_abs()
    }

    /// `(G^{1/2}, G^{−1/2})`.
    fn gram_roots(&self) -> Result<(ComplexMatrix, ComplexMatrix)> {
        let spec = self.gram.eig()?;
        if spec.values()[0] <= 0.0 {
            return Err(Error::Consistency(
                "norm Gram matrix is not positive".into(),
            ));
        }
        Ok((
            spec.map(|x| x.sqrt()).into_matrix(),
            spec.map(|x| 1.0 / x.sqrt()).into_matrix(),
        ))
    }

    /// `G^{1/2} h G^{−1/2}`, Hermitian and similar to `h`.
    pub fn hermitian_form(&self) -> Result<HermitianMatrix> {
        let (s, si) = self.gram_roots()?;
        HermitianMatrix::new(&(&s * &self.h) * &si)
    }

    pub fn spectrum(&self) -> Result<ModeSpectrum> {
        let (_, si) = self.gram_roots()?;
        let spec = self.hermitian_form()?.eig()?;
        Ok(ModeSpectrum {
            energies: spec.values().to_vec(),
            modes: &si * spec.vectors(),
        })
    }

    /// `e^{−iht}`.
    pub fn propagator(&self, t: f64) -> Result<ComplexMatrix> {
        let (s, si) = self.gram_roots()?;
        Ok(&(&si * &self.hermitian_form()?.unitary_exp(t)?) * &s)
    }

    /// `Ψ† G Ψ`.
    pub fn norm(&self, v: &[C64]) -> f64 {
        let gv = self.gram.as_matrix().apply(v);
        v.iter().zip(&gv).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// `Ψ† G h Ψ`, the Hamiltonian function of one mode.
    pub fn energy(&self, v: &[C64]) -> f64 {
        let hv = self.h.apply(v);
        let ghv = self.gram.as_matrix().apply(&hv);
        v.iter().zip(&ghv).map(|(a, b)| (a.conj() * b).re).sum()
    }
}

/// Largest `|E² − |k⃗|² − m²|` over the eigenvalues of `h(k⃗)`.
pub fn dispersion_residual(k: [f64; 3], mass: f64, n: &FourVector) -> Result<f64> {
    let spec = dirac_hamiltonian(k, mass, n)?.spectrum()?;
    let k2: f64 = k.iter().map(|x| x * x).sum();
    Ok(spec
        .energies
        .iter()
        .map(|e| (e * e - k2 - mass * mass).abs())
        .fold(0.0, f64::max))
}

/// The 27 wave vectors with components in `{−1, 0, 2}`.
pub fn dispersion_grid() -> Vec<[f64; 3]> {
    let v = [-1.0, 0.0, 2.0];
    itertools::iproduct!(v, v, v)
        .map(|(x, y, z)| [x, y, z])
        .collect()
}

/// Advances each `amplitude · mode` by `e^{−iht}` in the rest frame.
pub fn evolve_modes(modes: &[(SpinorMode, C64)], mass: f64, t: f64) -> Result<Vec<SpinorMode>> {
    evolve_modes_in_frame(modes, mass, t, &FourVector::rest())
}

pub fn evolve_modes_in_frame(
    modes: &[(SpinorMode, C64)],
    mass: f64,
    t: f64,
    n: &FourVector,
) -> Result<Vec<SpinorMode>> {
    modes
        .iter()
        .map(|(mode, amp)| {
            let u = dirac_hamiltonian(mode.k, mass, n)?.propagator(t)?;
            let v: Vec<C64> = mode.to_vector().iter().map(|z| z * amp).collect();
            Ok(SpinorMode::from_vector(mode.k, &u.apply(&v)))
        })
        .collect()
}

/// `Σ n^{AA'}(ψ_A ψ̄_{A'} + ξ̄_A ξ_{A'})` over the ensemble.
pub fn mode_norm(modes: &[SpinorMode], mass: f64, n: &FourVector) -> Result<f64> {
    modes
        .iter()
        .map(|m| Ok(dirac_hamiltonian(m.k, mass, n)?.norm(&m.to_vector())))
        .sum()
}

const FORM_PRECONDITION_TOL: f64 = 1e-12;

/// Residual of `k_a ψ^A = 2k^b (*σ_{ba})_B{}^A ψ^B + √2 m g_a^{AB'} ξ_{B'}`
/// and `k_a ξ_{A'} = 2k^b (*σ̄_{ba})_{A'}{}^{B'} ξ_{B'} + √2 m g_{aBA'} ψ^B`
/// on a solution with `k = (E, k⃗)`.
pub fn form_equivalence_test(mode: &SpinorMode, energy: f64, mass: f64) -> Result<f64> {
    let pre = dirac_residual(mode, energy, mass);
    if !(pre <= FORM_PRECONDITION_TOL) {
        return Err(Error::Precondition(alloc::format!(
            "mode is not a solution (Dirac residual {pre:e})"
        )));
    }
    let g = ivw_symbols();
    let sg = sigma_generators();
    let k_up = [energy, mode.k[0], mode.k[1], mode.k[2]];
    let k_low = FourVector(k_up).lower();
    let rm = core::f64::consts::SQRT_2 * mass;
    let mut worst: f64 = 0.0;
    #[allow(clippy::needless_range_loop)]
    for a in 0..4 {
        let (mut d, mut db) = (ComplexMatrix::zeros(2), ComplexMatrix::zeros(2));
        for b in 0..4 {
            d = &d + &sg.dual(b, a).scale_real(2.0 * k_up[b]);
            db = &db + &sg.dual_bar(b, a).scale_real(2.0 * k_up[b]);
        }
        let (ga_up, ga_low) = (g.lower_world(a), g.lower_world_lower_spinor(a));
        for x in 0..2 {
            let rhs1: C64 = (0..2)
                .map(|y| d[(y, x)] * mode.psi[y] + ga_up[(x, y)] * mode.xi[y] * rm)
                .sum();
            let rhs2: C64 = (0..2)
                .map(|y| db[(x, y)] * mode.xi[y] + ga_low[(y, x)] * mode.psi[y] * rm)
                .sum();
            worst = worst.max((mode.psi[x] * k_low[a] - rhs1).norm());
            worst = worst.max((mode.xi[x] * k_low[a] - rhs2).norm());
        }
    }
    Ok(worst)
}

/// Step of the centered time difference in [`hamilton_equations_check`].
pub const HAMILTON_DT: f64 = 1e-6;
const WIRTINGER_STEP: f64 = 1e-6;

/// `max |i dΨ/dt − I δH/δΨ̄|` over the ensemble in the rest frame.
pub fn hamilton_equations_check(modes: &[SpinorMode], mass: f64) -> Result<f64> {
    hamilton_equations_check_in_frame(modes, mass, &FourVector::rest())
}

/// `dΨ/dt` is a centered difference of [`evolve_modes_in_frame`] at `t = 0`;
/// `δH/δΨ̄` is a centered Wirtinger difference of `H = Ψ†GhΨ`; the Poisson
/// tensor `I` is `G⁻¹`, whose ξ block equals `2n_{AA'}`.
pub fn hamilton_equations_check_in_frame(
    modes: &[SpinorMode],
    mass: f64,
    n: &FourVector,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for mode in modes {
        let dh = dirac_hamiltonian(mode.k, mass, n)?;
        let v = mode.to_vector();
        let forward = evolve_modes_in_frame(&[(*mode, ONE)], mass, HAMILTON_DT, n)?[0].to_vector();
        let backward =
            evolve_modes_in_frame(&[(*mode, ONE)], mass, -HAMILTON_DT, n)?[0].to_vector();
        let i_dot: Vec<C64> = (0..4)
            .map(|j| (forward[j] - backward[j]) * C64::new(0.0, 1.0 / (2.0 * HAMILTON_DT)))
            .collect();

        let grad: Vec<C64> = (0..4)
            .map(|j| {
                let diff = |dz: C64| {
                    let (mut plus, mut minus) = (v, v);
                    plus[j] += dz;
                    minus[j] -= dz;
                    (dh.energy(&plus) - dh.energy(&minus)) / (2.0 * WIRTINGER_STEP)
                };
                let (dx, dy) = (diff(c(WIRTINGER_STEP)), diff(C64::new(0.0, WIRTINGER_STEP)));
                C64::new(dx, dy) * 0.5
            })
            .collect();
        let poisson = inverse_gram(dh.gram())?;
        let rhs = poisson.apply(&grad);
        worst = rhs
            .iter()
            .zip(&i_dot)
            .map(|(a, b)| (a - b).norm())
            .fold(worst, f64::max);
    }
    Ok(worst)
}

fn inverse_gram(g: &HermitianMatrix) -> Result<ComplexMatrix> {
    Ok(g.eig()?.map(|x| 1.0 / x).into_matrix())
}

/// `I = G⁻¹` for the slicing `n`.
pub fn poisson_tensor(n: &FourVector) -> Result<ComplexMatrix> {
    inverse_gram(dirac_hamiltonian([0.0; 3], 0.0, n)?.gram())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{random_complex_vector, seeded_rng};

    fn eigenmodes(k: [f64; 3], m: f64) -> Vec<(f64, SpinorMode)> {
        let spec = dirac_hamiltonian(k, m, &FourVector::rest())
            .unwrap()
            .spectrum()
            .unwrap();
        (0..4)
            .map(|c_| {
                let col: Vec<C64> = (0..4).map(|r| spec.modes[(r, c_)]).collect();
                (spec.energies[c_], SpinorMode::from_vector(k, &col))
            })
            .collect()
    }

    #[test]
    fn ivw_examples() {
        let g = ivw_symbols();
        assert!(
            (g.lower_world(0)
                - &ComplexMatrix::identity(2).scale_real(core::f64::consts::FRAC_1_SQRT_2))
                .max_abs()
                < 1e-16
        );
        let r = identity_residuals();
        assert!(
            r.iw1 <= 1e-14 && r.iw2 <= 1e-14 && r.slicing <= 1e-14,
            "{r:?}"
        );
    }

    #[test]
    fn appendix_identities_hold() {
        let r = identity_residuals();
        assert!(r.max() <= 1e-14, "{r:?}");
        assert!(sigma_generators().max_difference(&sigma_generators_spinor_form()) <= 1e-14);
        let s = sigma_generators();
        for a in 0..4 {
            assert_eq!(s.sigma(a, a).max_abs(), 0.0);
        }
    }

    #[test]
    fn wrong_duality_sign_is_detected() {
        let s = sigma_generators();
        let i = C64::new(0.0, 1.0);
        let worst = itertools::iproduct!(0..4, 0..4)
            .map(|(a, b)| (&s.dual(a, b) - &s.sigma_lower(a, b).scale(i)).max_abs())
            .fold(0.0, f64::max);
        assert!(worst > 0.5);
    }

    #[test]
    fn hamiltonian_spectra() {
        let rest = FourVector::rest();
        let cases: [([f64; 3], f64, f64); 3] = [
            ([0.0, 0.0, 1.0], 0.0, 1.0),
            ([4.0, 0.0, 0.0], 3.0, 5.0),
            ([0.0; 3], 2.0, 2.0),
        ];
        for (k, m, e) in cases {
            let dh = dirac_hamiltonian(k, m, &rest).unwrap();
            assert!(dh.matrix().hermitian_defect() < 1e-15);
            let spec = dh.spectrum().unwrap();
            let expected = [-e, -e, e, e];
            for (x, y) in spec.energies.iter().zip(expected) {
                assert!((x - y).abs() < 1e-12);
            }
        }
        assert!(dirac_hamiltonian([0.0; 3], 1.0, &FourVector::new(1.0, 1.0, 0.0, 0.0)).is_err());
        assert!(dirac_hamiltonian([0.0; 3], 1.0, &FourVector::new(-1.0, 0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn dispersion_on_grid() {
        for m in [0.0, 0.5, 1.0, 3.0] {
            for k in dispersion_grid() {
                assert!(dispersion_residual(k, m, &FourVector::rest()).unwrap() <= 1e-10);
            }
        }
        assert_eq!(dispersion_grid().len(), 27);
    }

    #[test]
    fn boosted_slicing_is_self_adjoint_with_real_spectrum() {
        let n = FourVector::boost_z(0.3);
        let dh = dirac_hamiltonian([0.3, -1.2, 0.7], 1.3, &n).unwrap();
        assert!(dh.self_adjointness_defect() < 1e-14);
        assert!(dispersion_residual([0.3, -1.2, 0.7], 1.3, &n).unwrap() < 1e-10);
        let spec = dh.spectrum().unwrap();
        for c_ in 0..4 {
            let col: Vec<C64> = (0..4).map(|r| spec.modes[(r, c_)]).collect();
            let mode = SpinorMode::from_vector([0.3, -1.2, 0.7], &col);
            assert!(dirac_residual_in_frame(&mode, spec.energies[c_], 1.3, &n) < 1e-12);
        }
    }

    #[test]
    fn residual_examples() {
        // m = 0, k = ẑ: k_{AA'}ψ^A = 0 selects ψ = (1, 0).
        let mode = SpinorMode::new([0.0, 0.0, 1.0], [ONE, ZERO], [ZERO, ZERO]);
        assert!(dirac_residual(&mode, 1.0, 0.0) <= 1e-14);
        for (e, mode) in eigenmodes([0.3, -1.2, 0.7], 1.3) {
            assert!(dirac_residual(&mode, e, 1.3) <= 1e-12);
        }
        let mut rng = seeded_rng(3);
        let v = random_complex_vector(&mut rng, 4);
        assert!(dirac_residual(&SpinorMode::from_vector([1.0, 0.0, 0.0], &v), 1.5, 1.0) >= 0.1);
    }

    #[test]
    fn poisson_tensor_is_twice_n_lower() {
        for n in [FourVector::rest(), FourVector::boost_z(0.3)] {
            let inv = poisson_tensor(&n).unwrap();
            let nl = ivw_symbols().spinor_lower(&n);
            for (i, j) in itertools::iproduct!(0..2, 0..2) {
                assert!((inv[(i + 2, j + 2)] - nl[(i, j)] * 2.0).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn evolution_examples() {
        let modes: Vec<(SpinorMode, C64)> = eigenmodes([0.3, -1.2, 0.7], 1.0)
            .into_iter()
            .map(|(_, m)| (m, ONE))
            .collect();
        let same = evolve_modes(&modes, 1.0, 0.0).unwrap();
        for (a, (b, _)) in same.iter().zip(&modes) {
            for (x, y) in a.to_vector().iter().zip(b.to_vector()) {
                assert!((x - y).norm() < 1e-14);
            }
        }
        let (e, mode) = eigenmodes([0.3, -1.2, 0.7], 1.0)[3];
        let out = evolve_modes(&[(mode, ONE)], 1.0, 2.0).unwrap()[0];
        let phase = C64::from_polar(1.0, -e * 2.0);
        for (x, y) in out.to_vector().iter().zip(mode.to_vector()) {
            assert!((x - y * phase).norm() < 1e-13);
        }
    }

    #[test]
    fn form_equivalence_on_solutions() {
        let chiral = SpinorMode::new([0.0, 0.0, 1.0], [ONE, ZERO], [ZERO, ZERO]);
        assert!(form_equivalence_test(&chiral, 1.0, 0.0).unwrap() <= 1e-13);
        for (e, mode) in eigenmodes([0.0; 3], 2.0) {
            assert!(form_equivalence_test(&mode, e, 2.0).unwrap() <= 1e-13);
        }
        for (e, mode) in eigenmodes([0.3, -1.2, 0.7], 1.3) {
            assert!(form_equivalence_test(&mode, e, 1.3).unwrap() <= 1e-12);
        }
        let junk = SpinorMode::new([1.0, 0.0, 0.0], [ONE, ONE], [ONE, ZERO]);
        assert!(matches!(
            form_equivalence_test(&junk, 1.0, 1.0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn hamilton_equations_match_evolution() {
        let (_, mode) = eigenmodes([0.3, -1.2, 0.7], 1.0)[0];
        assert!(hamilton_equations_check(&[mode], 1.0).unwrap() <= 1e-8);
        let mut rng = seeded_rng(5);
        let ensemble: Vec<SpinorMode> = (0..5)
            .map(|i| {
                let v = random_complex_vector(&mut rng, 4);
                SpinorMode::from_vector([0.5 * i as f64, -0.3, 1.0], &v)
            })
            .collect();
        assert!(hamilton_equations_check(&ensemble, 1.0).unwrap() <= 1e-6);
        assert!(hamilton_equations_check(&ensemble, 0.0).unwrap() <= 1e-6);
        assert!(
            hamilton_equations_check_in_frame(&ensemble, 1.0, &FourVector::boost_z(0.3)).unwrap()
                <= 1e-6
        );
    }
}
