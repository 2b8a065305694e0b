//! Scalar functionals `F[ρ]` together with their gradients `δF/δρ`.
//!
//! The gradient is the Hermitian matrix `∇F` with
//! `dF = Re Tr(∇F · dρ)` for Hermitian `dρ`. Generators of the Lie-Nambu flow
//! whose gradient is a spectral function of `ρ` (Casimirs, Rényi-type
//! generators, functions of Casimirs) also report that function through
//! [`Functional::spectral_gradient`]; the isospectral integrator needs it.

use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::matrix::{
    floored_power, integer_power, power_from_spectrum, random_hermitian_with, seeded_rng,
    trace_power, DensityMatrix, HermitianMatrix, Spectrum,
};
use crate::{Error, Result};

/// Kind tag carried by every functional.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FunctionalKind {
    Linear,
    Casimir,
    RenyiA,
    RenyiB,
    CasimirFunction,
    /// Quadratic forms, products and local (subsystem) functionals.
    Composite,
}

pub trait Functional: Send + Sync {
    fn kind(&self) -> FunctionalKind;

    fn value(&self, rho: &DensityMatrix) -> Result<f64>;

    fn gradient(&self, rho: &DensityMatrix) -> Result<HermitianMatrix>;

    /// For `∇F = φ(ρ) + c·1`: the values `φ(p_k)` at the eigenvalues of `ρ`
    /// (the constant `c` may be folded in). `None` when the gradient is not
    /// a function of `ρ` alone.
    fn spectral_gradient(
        &self,
        _rho: &DensityMatrix,
        _spec: &Spectrum,
    ) -> Option<Result<Vec<f64>>> {
        None
    }

    /// The operator `Â` when `F[ρ] = Tr(Âρ)`.
    fn linear_operator(&self) -> Option<&HermitianMatrix> {
        None
    }
}

impl<F: Functional + ?Sized> Functional for Box<F> {
    fn kind(&self) -> FunctionalKind {
        (**self).kind()
    }
    fn value(&self, rho: &DensityMatrix) -> Result<f64> {
        (**self).value(rho)
    }
    fn gradient(&self, rho: &DensityMatrix) -> Result<HermitianMatrix> {
        (**self).gradient(rho)
    }
    fn spectral_gradient(&self, rho: &DensityMatrix, spec: &Spectrum) -> Option<Result<Vec<f64>>> {
        (**self).spectral_gradient(rho, spec)
    }
    fn linear_operator(&self) -> Option<&HermitianMatrix> {
        (**self).linear_operator()
    }
}

fn check_dim(expected: usize, rho: &DensityMatrix) -> Result<()> {
    if rho.dim() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: rho.dim(),
        });
    }
    Ok(())
}

/// `H[ρ] = Tr(Âρ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearObservable {
    op: HermitianMatrix,
}

pub fn linear_observable(op: HermitianMatrix) -> LinearObservable {
    LinearObservable { op }
}

impl LinearObservable {
    pub fn operator(&self) -> &HermitianMatrix {
        &self.op
    }
}

impl Functional for LinearObservable {
    fn kind(&self) -> FunctionalKind {
        FunctionalKind::Linear
    }
    fn value(&self, rho: &DensityMatrix) -> Result<f64> {
        check_dim(self.op.dim(), rho)?;
        Ok(self.op.expectation(rho))
    }
    fn gradient(&self, rho: &DensityMatrix) -> Result<HermitianMatrix> {
        check_dim(self.op.dim(), rho)?;
        Ok(self.op.clone())
    }
    fn linear_operator(&self) -> Option<&HermitianMatrix> {
        Some(&self.op)
    }
}

/// `Cₙ[ρ] = Tr ρⁿ`, gradient `n ρⁿ⁻¹`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Casimir {
    n: u32,
}

pub fn casimir(n: u32) -> Result<Casimir> {
    if n == 0 {
        return Err(Error::Domain("Casimir order must be >= 1".into()));
    }
    Ok(Casimir { n })
}

impl Casimir {
    pub fn order(&self) -> u32 {
        self.n
    }
}

impl Functional for Casimir {
    fn kind(&self) -> FunctionalKind {
        FunctionalKind::Casimir
    }
    fn value(&self, rho: &DensityMatrix) -> Result<f64> {
        trace_power(rho, self.n)
    }
    fn gradient(&self, rho: &DensityMatrix) -> Result<HermitianMatrix> {
        let p = integer_power(rho, self.n - 1);
        Ok(crate::matrix::hermitize(&p.scale_real(self.n as f64)))
    }
    fn spectral_gradient(&self, _rho: &DensityMatrix, spec: &Spectrum) -> Option<Result<Vec<f64>>> {
        let n = self.n as i32;
        Some(Ok(spec
            .values()
            .iter()
            .map(|&p| n as f64 * p.powi(n - 1))
            .collect()))
    }
}

/// `Tr ρ^α` (floored spectrum) and `Tr ρ`, the two traces the Rényi-type
/// generators depend on.
struct RenyiTraces {
    power: f64,
    trace: f64,
}

impl RenyiTraces {
    fn new(rho: &DensityMatrix, spec: &Spectrum, alpha: f64) -> Result<Self> {
        let power: f64 = spec.values().iter().map(|&p| floored_power(p, alpha)).sum();
        if !(power > 0.0) {
            return Err(Error::DegenerateState);
        }
        Ok(RenyiTraces {
            power,
            trace: rho.trace_real(),
        })
    }

    /// `(Tr ρ^α)^{e} (Tr ρ)^{1−e}` with `e = 1/(α−1)`.
    fn homogeneous(&self, alpha: f64) -> f64 {
        let e = 1.0 / (alpha - 1.0);
        self.power.powf(e) * self.trace.powf(1.0 - e)
    }

    /// `c₁ = (Tr ρ^α / Tr ρ)^{e−1}`.
    fn c1(&self, alpha: f64) -> f64 {
        let e = 1.0 / (alpha - 1.0);
        (self.power / self.trace).powf(e - 1.0)
    }

    /// Derivative of `homogeneous` with respect to `Tr ρ` (the identity term).
    fn identity_coefficient(&self, alpha: f64) -> f64 {
        let e = 1.0 / (alpha - 1.0);
        (1.0 - e) * self.power.powf(e) * self.trace.powf(-e)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(Error::Domain(alloc::format!(
            "alpha must be > 1, got {alpha}"
        )));
    }
    Ok(())
}

/// `S_α = (1 − 1/α) (Tr ρ^α)^{1/(α−1)} / (Tr ρ)^{1/(α−1)−1}`.
///
/// Homogeneous of degree two like `C₂/2` and equal to it at `α = 2`. On
/// normalized pure states `c₁ = 1` for every `α`, so pure-state motion is linear.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RenyiA {
    alpha: f64,
}

pub fn renyi_a(alpha: f64) -> Result<RenyiA> {
    check_alpha(alpha)?;
    Ok(RenyiA { alpha })
}

impl RenyiA {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `c₁` of the gradient `c₁ ρ^{α−1} + c₂ 1`.
    pub fn rate_coefficient(&self, rho: &DensityMatrix) -> Result<f64> {
        let spec = rho.eig()?;
        Ok(RenyiTraces::new(rho, &spec, self.alpha)?.c1(self.alpha))
    }

    fn prefactor(&self) -> f64 {
        1.0 - 1.0 / self.alpha
    }
}

impl Functional for RenyiA {
    fn kind(&self) -> FunctionalKind {
        FunctionalKind::RenyiA
    }
    fn value(&self, rho: &DensityMatrix) -> Result<f64> {
        let spec = rho.eig()?;
        Ok(self.prefactor() * RenyiTraces::new(rho, &spec, self.alpha)?.homogeneous(self.alpha))
    }
    fn gradient(&self, rho: &DensityMatrix) -> Result<HermitianMatrix> {
        let spec = rho.eig()?;
        let tr = RenyiTraces::new(rho, &spec, self.alpha)?;
        let main = power_from_spectrum(&spec, self.alpha - 1.0)?.scale(tr.c1(self.alpha));
        Ok(main.add_identity(self.prefactor() * tr.identity_coefficient(self.alpha)))
    }
    fn spectral_gradient(&self, rho: &DensityMatrix, spec: &Spectrum) -> Option<Result<Vec<f64>>> {
        Some(RenyiTraces::new(rho, spec, self.alpha).map(|tr| {
            let c1 = tr.c1(self.alpha);
            spec.values()
                .iter()
                .map(|&p| c1 * floored_power(p, self.alpha - 1.0))
                .collect()
        }))
    }
}

/// `S_α = ½ (Tr ρ^α)^{1/(α−1)} / (Tr ρ)^{1/(α−1)−1}`; reduces to `½ (Tr ρ)²`
/// on pure states.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RenyiB {
    alpha: f64,
}

pub fn renyi_b(alpha: f64) -> Result<RenyiB> {
    check_alpha(alpha)?;
    Ok(RenyiB { alpha })
}

impl RenyiB {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Coefficient of `ρ^{α−1}` in the gradient: `½ α/(α−1) c₁`.
    fn main_coefficient(&self, tr: &RenyiTraces) -> f64 {
        0.5 * self.alpha / (self.alpha - 1.0) * tr.c1(self.alpha)
    }
}

impl Functional for RenyiB {
    fn kind(&self) -> FunctionalKind {
        FunctionalKind::RenyiB
    }
    fn value(&self, rho: &DensityMatrix) -> Result<f64> {
        let spec = rho.eig()?;
        Ok(0.5 * RenyiTraces::new(rho, &spec, self.alpha)?.homogeneous(self.alpha))
    }
    fn gradient(&self, rho: &DensityMatrix) -> Result<HermitianMatrix> {
        let spec = rho.eig()?;
        let tr = RenyiTraces::new(rho, &spec, self.alpha)?;
        let main = power_from_spectrum(&spec, self.alpha - 1.0)?.scale(self.main_coefficient(&tr));
        Ok(main.add_identity(0.5 * tr.identity_coefficient(self.alpha)))
    }
    fn spectral_gradient(&self, rho: &DensityMatrix, spec: &Spectrum) -> Option<Result<Vec<f64>>> {
        Some(RenyiTraces::new(rho, spec, self.alpha).map(|tr| {
            let c = self.main_coefficient(&tr);
            spec.values()
                .iter()
                .map(|&p| c * floored_power(p, self.alpha - 1.0))
                .collect()
        }))
    }
}

/// Named scalar functions of the Casimirs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CasimirPreset {
    /// `C₂/2`, the entropy of the linear equation.
    C2Half,
    C1,
    /// `C₂² + C₃`.
    C2SqPlusC3,
}

impl CasimirPreset {
    pub fn name(self) -> &'static str {
        match self {
            CasimirPreset::C2Half => "c2_half",
            CasimirPreset::C1 => "c1",
            CasimirPreset::C2SqPlusC3 => "c2sq_plus_c3",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [
            CasimirPreset::C2Half,
            CasimirPreset::C1,
            CasimirPreset::C2SqPlusC3,
        ]
        .into_iter()
        .find(|p| p.name() == name)
    }
}

type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type PartialsFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// `S = φ(C₁, …, C_kmax)` with caller-supplied partial derivatives.
/// `φ` and the partials receive `[C₁, …, C_kmax]`.
#[derive(Clone)]
pub struct CasimirFunction {
    k_max: u32,
    phi: ScalarFn,
    partials: PartialsFn,
    preset: Option<CasimirPreset>,
}

impl fmt::Debug for CasimirFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CasimirFunction")
            .field("k_max", &self.k_max)
            .field("preset", &self.preset)
            .finish_non_exhaustive()
    }
}

pub fn casimir_function(
    k_max: u32,
    phi: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    partials: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
) -> Result<CasimirFunction> {
    if k_max == 0 {
        return Err(Error::Domain("k_max must be >= 1".into()));
    }
    Ok(CasimirFunction {
        k_max,
        phi: Arc::new(phi),
        partials: Arc::new(partials),
        preset: None,
    })
}

impl CasimirFunction {
    pub fn preset(preset: CasimirPreset) -> Self {
        let mut f = match preset {
            CasimirPreset::C2Half => casimir_function(2, |c| c[1] / 2.0, |_| vec![0.0, 0.5]),
            CasimirPreset::C1 => casimir_function(1, |c| c[0], |_| vec![1.0]),
            CasimirPreset::C2SqPlusC3 => {
                casimir_function(3, |c| c[1] * c[1] + c[2], |c| vec![0.0, 2.0 * c[1], 1.0])
            }
        }
        .expect("presets have k_max >= 1");
        f.preset = Some(preset);
        f
    }

    pub fn preset_kind(&self) -> Option<CasimirPreset> {
        self.preset
    }

    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    fn casimirs(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        (1..=self.k_max).map(|k| trace_power(rho, k)).collect()
    }

    fn checked_partials(&self, c: &[f64]) -> Result<Vec<f64>> {
        let d = (self.partials)(c);
        if d.len() != self.k_max as usize {
            return Err(Error::Domain(alloc::format!(
                "expected {} partial derivatives, got {}",
                self.k_max,
                d.len()
            )));
        }
        Ok(d)
    }
}

impl Functional for CasimirFunction {
    fn kind(&self) -> FunctionalKind {
        FunctionalKind::CasimirFunction
    }
    fn value(&self, rho: &DensityMatrix) -> Result<f64> {
        Ok((self.phi)(&self.casimirs(rho)?))
    }
    fn gradient(&self, rho: &DensityMatrix) -> Result<HermitianMatrix> {
        let d = self.checked_partials(&self.casimirs(rho)?)?;
        let mut acc = crate::ComplexMatrix::zeros(rho.dim());
        let mut power = crate::ComplexMatrix::identity(rho.dim());
        for (k, dk) in d.iter().enumerate() {
            if k > 0 {
                power = &power * rho.as_matrix();
            }
            acc = &acc + &power.scale_real(dk * (k + 1) as f64);
        }
        Ok(crate::matrix::hermitize(&acc))
    }
    fn spectral_gradient(&self, rho: &DensityMatrix, spec: &Spectrum) -> Option<Result<Vec<f64>>> {
        let d = match self.casimirs(rho).and_then(|c| self.checked_partials(&c)) {
            Ok(d) => d,
            Err(e) => return Some(Err(e)),
        };
        Some(Ok(spec
            .values()
            .iter()
            .map(|&p| {
                d.iter()
                    .enumerate()
                    .map(|(k, dk)| dk * (k + 1) as f64 * p.powi(k as i32))
                    .sum()
            })
            .collect()))
    }
}

/// `F[ρ] = Tr((Âρ)²)`, gradient `2ÂρÂ`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticObservable {
    op: HermitianMatrix,
}

pub fn quadratic_observable(op: HermitianMatrix) -> QuadraticObservable {
    QuadraticObservable { op }
}

impl Functional for QuadraticObservable {
    fn kind(&self) -> FunctionalKind {
        FunctionalKind::Composite
    }
    fn value(&self, rho: &DensityMatrix) -> Result<f64> {
        check_dim(self.op.dim(), rho)?;
        let ar = self.op.as_matrix() * rho.as_matrix();
        Ok(ar.trace_product(&ar).re)
    }
    fn gradient(&self, rho: &DensityMatrix) -> Result<HermitianMatrix> {
        check_dim(self.op.dim(), rho)?;
        let a = self.op.as_matrix();
        Ok(crate::matrix::hermitize(
            &(&(a * rho.as_matrix()) * a).scale_real(2.0),
        ))
    }
}

/// Pointwise product `F·G`; gradient by the product rule.
pub struct Product<F, G> {
    pub left: F,
    pub right: G,
}

impl<F: Functional, G: Functional> Functional for Product<F, G> {
    fn kind(&self) -> FunctionalKind {
        FunctionalKind::Composite
    }
    fn value(&self, rho: &DensityMatrix) -> Result<f64> {
        Ok(self.left.value(rho)? * self.right.value(rho)?)
    }
    fn gradient(&self, rho: &DensityMatrix) -> Result<HermitianMatrix> {
        let (f, g) = (self.left.value(rho)?, self.right.value(rho)?);
        Ok(self
            .right
            .gradient(rho)?
            .scale(f)
            .add(&self.left.gradient(rho)?.scale(g)))
    }
}

/// Number of random directions probed by [`gradient_check`].
pub const GRADIENT_CHECK_DIRECTIONS: usize = 20;
const GRADIENT_CHECK_SEED: u64 = 0x6772_6164;

/// Maximum over 20 seeded Hermitian directions `Δ` (`‖Δ‖_max = 1`) of
/// `|(F(ρ+εΔ) − F(ρ−εΔ))/(2ε) − Tr(∇F(ρ)Δ)|`.
///
/// A direction that leaves the PSD cone is halved up to five times and then
/// skipped.
pub fn gradient_check(f: &dyn Functional, rho: &DensityMatrix, eps: f64) -> Result<f64> {
    gradient_check_seeded(f, rho, eps, GRADIENT_CHECK_SEED)
}

pub fn gradient_check_seeded(
    f: &dyn Functional,
    rho: &DensityMatrix,
    eps: f64,
    seed: u64,
) -> Result<f64> {
    if !(1e-7..=1e-3).contains(&eps) {
        return Err(Error::Domain(alloc::format!(
            "finite-difference step {eps:e} outside [1e-7, 1e-3]"
        )));
    }
    let grad = f.gradient(rho)?;
    let mut rng = seeded_rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..GRADIENT_CHECK_DIRECTIONS {
        let raw = random_hermitian_with(&mut rng, rho.dim());
        let mut dir = raw.scale(1.0 / raw.max_abs());
        for _attempt in 0..=5 {
            let plus = DensityMatrix::new(rho.as_hermitian().add(&dir.scale(eps)));
            let minus = DensityMatrix::new(rho.as_hermitian().sub(&dir.scale(eps)));
            match (plus, minus) {
                (Ok(plus), Ok(minus)) => {
                    let fd = (f.value(&plus)? - f.value(&minus)?) / (2.0 * eps);
                    let analytic = grad.expectation(dir.as_matrix());
                    worst = worst.max((fd - analytic).abs());
                    break;
                }
                _ => dir = dir.scale(0.5),
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{commutator, random_density, random_hermitian};
    use crate::ComplexMatrix;

    fn sigma_z() -> HermitianMatrix {
        HermitianMatrix::from_real_diagonal(&[1.0, -1.0])
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn linear_examples() {
        let rho = random_density(3, 2, 1).unwrap().scaled(2.5).unwrap();
        let id = linear_observable(HermitianMatrix::identity(3));
        assert!(close(id.value(&rho).unwrap(), rho.trace_real(), 1e-14));
        let diag = DensityMatrix::from_real_diagonal(&[0.7, 0.3]).unwrap();
        assert!(close(
            linear_observable(sigma_z()).value(&diag).unwrap(),
            0.4,
            1e-15
        ));
        let a = linear_observable(random_hermitian(4, 3));
        let rho4 = random_density(4, 4, 8).unwrap();
        assert!(gradient_check(&a, &rho4, 1e-5).unwrap() <= 1e-8);
        assert!(matches!(
            a.value(&diag),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn casimir_examples() {
        let c1 = casimir(1).unwrap();
        let rho = random_density(3, 3, 2).unwrap();
        assert!(
            (c1.gradient(&rho).unwrap().as_matrix() - &ComplexMatrix::identity(3)).max_abs() == 0.0
        );
        let c2 = casimir(2).unwrap();
        let half = DensityMatrix::from_real_diagonal(&[0.5, 0.5]).unwrap();
        assert!(close(c2.value(&half).unwrap(), 0.5, 1e-15));
        assert!(
            (c2.gradient(&half).unwrap().as_matrix() - &ComplexMatrix::identity(2)).max_abs()
                < 1e-15
        );
        let c4 = casimir(4).unwrap();
        assert!(gradient_check(&c4, &rho, 1e-5).unwrap() <= 1e-6);
        assert!(casimir(0).is_err());
    }

    #[test]
    fn casimir_gradient_commutes_with_state() {
        for seed in 0..10 {
            let rho = random_density(4, 3, seed).unwrap();
            for n in 1..=5 {
                let g = casimir(n).unwrap().gradient(&rho).unwrap();
                assert!(commutator(&g, &rho).unwrap().max_abs() <= 1e-10);
            }
            let g = CasimirFunction::preset(CasimirPreset::C2SqPlusC3)
                .gradient(&rho)
                .unwrap();
            assert!(commutator(&g, &rho).unwrap().max_abs() <= 1e-10);
        }
    }

    #[test]
    fn renyi_a_reduces_to_half_purity_at_two() {
        let s = renyi_a(2.0).unwrap();
        for seed in 0..10 {
            let rho = random_density(4, 1 + seed as usize % 4, seed).unwrap();
            let c2 = trace_power(&rho, 2).unwrap();
            assert!(close(s.value(&rho).unwrap(), c2 / 2.0, 1e-13));
        }
    }

    #[test]
    fn renyi_a_pure_state_coefficient_and_value() {
        for alpha in [1.5, 2.0, 3.0, 4.0] {
            let s = renyi_a(alpha).unwrap();
            let pure = random_density(4, 1, 5).unwrap();
            assert!(
                close(s.rate_coefficient(&pure).unwrap(), 1.0, 1e-12),
                "alpha {alpha}"
            );
            assert!(close(s.value(&pure).unwrap(), 1.0 - 1.0 / alpha, 1e-12));
        }
    }

    #[test]
    fn renyi_gradients_pass_finite_differences() {
        let rho = random_density(4, 4, 21).unwrap();
        assert!(gradient_check(&renyi_a(3.0).unwrap(), &rho, 1e-5).unwrap() <= 1e-6);
        assert!(gradient_check(&renyi_a(2.5).unwrap(), &rho, 1e-5).unwrap() <= 1e-6);
        assert!(gradient_check(&renyi_b(3.0).unwrap(), &rho, 1e-5).unwrap() <= 1e-6);
        // Unnormalized states exercise the identity-direction terms.
        let big = rho.scaled(3.0).unwrap();
        assert!(gradient_check(&renyi_a(1.5).unwrap(), &big, 1e-5).unwrap() <= 1e-6);
        assert!(gradient_check(&renyi_b(1.5).unwrap(), &big, 1e-5).unwrap() <= 1e-6);
    }

    #[test]
    fn renyi_b_examples() {
        for alpha in [1.5, 3.0] {
            let pure = random_density(3, 1, 4).unwrap().scaled(1.7).unwrap();
            let v = renyi_b(alpha).unwrap().value(&pure).unwrap();
            assert!(close(v, 0.5 * 1.7 * 1.7, 1e-12));
        }
        for seed in 0..20 {
            let rho = random_density(3, 3, 100 + seed).unwrap();
            let a = renyi_a(2.0).unwrap().value(&rho).unwrap();
            let b = renyi_b(2.0).unwrap().value(&rho).unwrap();
            assert!(close(a, b, 1e-14));
        }
    }

    #[test]
    fn renyi_domain() {
        assert!(matches!(renyi_a(1.0), Err(Error::Domain(_))));
        assert!(matches!(renyi_b(0.5), Err(Error::Domain(_))));
        assert!(renyi_a(f64::NAN).is_err());
    }

    #[test]
    fn renyi_homogeneity_degree_two() {
        let rho = random_density(4, 3, 12).unwrap();
        for alpha in [1.5, 2.0, 3.0, 4.0] {
            let s = renyi_a(alpha).unwrap();
            let base = s.value(&rho).unwrap();
            for lambda in [0.5, 2.0, 10.0] {
                let scaled = s.value(&rho.scaled(lambda).unwrap()).unwrap();
                assert!(((scaled - lambda * lambda * base) / scaled).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn casimir_function_examples() {
        let rho = random_density(3, 3, 6).unwrap();
        let half = CasimirFunction::preset(CasimirPreset::C2Half);
        assert!((half.gradient(&rho).unwrap().as_matrix() - rho.as_matrix()).max_abs() < 1e-15);
        let c1 = CasimirFunction::preset(CasimirPreset::C1);
        assert!(
            (c1.gradient(&rho).unwrap().as_matrix() - &ComplexMatrix::identity(3)).max_abs()
                < 1e-15
        );
        let mix = CasimirFunction::preset(CasimirPreset::C2SqPlusC3);
        assert!(gradient_check(&mix, &rho, 1e-5).unwrap() <= 1e-6);
        assert_eq!(
            CasimirPreset::from_name("c2sq_plus_c3"),
            Some(CasimirPreset::C2SqPlusC3)
        );
        assert_eq!(CasimirPreset::from_name("c7"), None);
    }

    #[test]
    fn casimir_function_rejects_wrong_partials() {
        let bad = casimir_function(2, |c| c[0], |_| vec![1.0]).unwrap();
        let rho = random_density(2, 2, 1).unwrap();
        assert!(matches!(bad.gradient(&rho), Err(Error::Domain(_))));
    }

    #[test]
    fn spectral_gradient_matches_gradient() {
        let rho = random_density(4, 4, 33).unwrap().scaled(1.3).unwrap();
        let spec = rho.eig().unwrap();
        let generators: Vec<Box<dyn Functional>> = vec![
            Box::new(casimir(3).unwrap()),
            Box::new(renyi_a(2.5).unwrap()),
            Box::new(renyi_b(3.0).unwrap()),
            Box::new(CasimirFunction::preset(CasimirPreset::C2SqPlusC3)),
        ];
        for g in &generators {
            let phi = g.spectral_gradient(&rho, &spec).unwrap().unwrap();
            let from_phi = spec.map_values(&phi);
            // Equal up to a multiple of the identity.
            let diff = g.gradient(&rho).unwrap().sub(&from_phi);
            let shift = diff[(0, 0)].re;
            assert!(diff.add_identity(-shift).max_abs() < 1e-12);
        }
        assert!(linear_observable(random_hermitian(4, 1))
            .spectral_gradient(&rho, &spec)
            .is_none());
    }

    #[test]
    fn gradient_check_step_range() {
        let rho = random_density(2, 2, 1).unwrap();
        assert!(gradient_check(&casimir(2).unwrap(), &rho, 1e-2).is_err());
        assert!(gradient_check(&casimir(2).unwrap(), &rho, 1e-8).is_err());
    }

    #[test]
    fn gradient_check_second_order_convergence() {
        let rho = random_density(3, 3, 4).unwrap();
        let f = casimir(3).unwrap();
        let e1 = gradient_check(&f, &rho, 1e-3).unwrap();
        let e2 = gradient_check(&f, &rho, 1e-4).unwrap();
        let order = (e1 / e2).log10();
        assert!(order >= 1.9, "observed order {order}");
    }

    #[test]
    fn gradient_check_survives_boundary_states() {
        // Rank-deficient: most directions leave the cone and get halved/skipped.
        let pure = random_density(3, 1, 9).unwrap();
        let err = gradient_check(&linear_observable(random_hermitian(3, 2)), &pure, 1e-5).unwrap();
        assert!(err <= 1e-10);
    }
}
