//! Fixed-step integration of `ρ̇ = −i[∇H, ∇S]`.
//!
//! Two steppers are provided:
//!
//! - [`step_rk4`]: classical Runge-Kutta on the matrix ODE. Works for any
//!   pair of functionals; conserved quantities drift at `O(dt⁴)`.
//! - [`step_isospectral`]: when `∇S = φ(ρ) + c·1` the flow has Lax form
//!   `ρ̇ = [B(ρ), ρ]` with skew-Hermitian `B`. The step is the fourth-order
//!   Munthe-Kaas method on that form, so every stage and the output are unitary
//!   conjugates of `ρ` and the spectrum is kept to rounding.

use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::functionals::{Functional, RenyiA};
use crate::matrix::{
    commutator, hermitize, trace_power, ComplexMatrix, DensityMatrix, HermitianMatrix, Spectrum,
};
use crate::{Error, Result, C64};

/// Eigenvalue gaps below `DEGENERACY_TOL · max(1, p_max)` get a zero generator entry.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Rk4,
    Isospectral,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Rk4 => "rk4",
            Method::Isospectral => "isospectral",
        }
    }
}

const MINUS_I: C64 = C64::new(0.0, -1.0);

fn rhs<H, S>(h: &H, s: &S, rho: &DensityMatrix) -> Result<ComplexMatrix>
where
    H: Functional + ?Sized,
    S: Functional + ?Sized,
{
    let (dh, ds) = (h.gradient(rho)?, s.gradient(rho)?);
    Ok(commutator(dh.as_matrix(), ds.as_matrix())?.scale(MINUS_I))
}

fn shifted(rho: &DensityMatrix, k: &ComplexMatrix, c: f64) -> DensityMatrix {
    DensityMatrix::from_hermitian_unchecked(hermitize(&(rho.as_matrix() + &k.scale_real(c))))
}

/// One classical RK4 step; the output is hermitized but not projected to
/// the PSD cone.
pub fn step_rk4<H, S>(rho: &DensityMatrix, dt: f64, h: &H, s: &S) -> Result<DensityMatrix>
where
    H: Functional + ?Sized,
    S: Functional + ?Sized,
{
    let k1 = rhs(h, s, rho)?;
    let k2 = rhs(h, s, &shifted(rho, &k1, dt / 2.0))?;
    let k3 = rhs(h, s, &shifted(rho, &k2, dt / 2.0))?;
    let k4 = rhs(h, s, &shifted(rho, &k3, dt))?;
    let sum = &(&(&k1 + &k2.scale_real(2.0)) + &k3.scale_real(2.0)) + &k4;
    Ok(shifted(rho, &sum, dt / 6.0))
}

/// Skew-Hermitian `B` with `[B, ρ] = −i[∇H, ∇S]`.
///
/// In the eigenbasis of `ρ`: `B_jk = −i H'_jk (φ(p_k) − φ(p_j))/(p_k − p_j)`.
/// Entries that commute with `ρ` (the diagonal and near-degenerate pairs)
/// do not affect the flow; they take the chord slope
/// `(φ(p_max) − φ(p_min))/(p_max − p_min)` so that `B = −i s Ĥ` exactly when
/// `φ` is affine on the spectrum (linear generators, every pure state).
pub fn lax_generator<H, S>(rho: &DensityMatrix, h: &H, s: &S) -> Result<ComplexMatrix>
where
    H: Functional + ?Sized,
    S: Functional + ?Sized,
{
    let spec = rho.eig()?;
    lax_generator_with(rho, &spec, h, s)
}

fn lax_generator_with<H, S>(
    rho: &DensityMatrix,
    spec: &Spectrum,
    h: &H,
    s: &S,
) -> Result<ComplexMatrix>
where
    H: Functional + ?Sized,
    S: Functional + ?Sized,
{
    let phi = s.spectral_gradient(rho, spec).ok_or_else(|| {
        Error::UnsupportedGenerator(alloc::format!(
            "{:?} gradient is not a function of rho",
            s.kind()
        ))
    })??;
    let hp = spec.to_eigenbasis(h.gradient(rho)?.as_matrix());
    let p = spec.values();
    let gap = DEGENERACY_TOL * p.iter().fold(1.0_f64, |m, &x| m.max(x));
    let n = p.len();
    let span = p[n - 1] - p[0];
    let chord = if span > gap {
        (phi[n - 1] - phi[0]) / span
    } else {
        0.0
    };
    let b = ComplexMatrix::from_fn(n, |j, k| {
        let dp = p[k] - p[j];
        let slope = if dp.abs() > gap {
            (phi[k] - phi[j]) / dp
        } else {
            chord
        };
        hp[(j, k)] * MINUS_I * slope
    });
    Ok(spec.from_eigenbasis(&b))
}

/// `e^B` for skew-Hermitian `B`, through the spectrum of `iB`.
fn exp_skew(b: &ComplexMatrix) -> Result<ComplexMatrix> {
    hermitize(&b.scale(C64::new(0.0, 1.0))).unitary_exp(1.0)
}

fn conjugate(rho: &DensityMatrix, b: &ComplexMatrix) -> Result<DensityMatrix> {
    Ok(DensityMatrix::from_hermitian_unchecked(
        rho.conjugate_by(&exp_skew(b)?),
    ))
}

/// One fourth-order Munthe-Kaas step on `ρ̇ = [B(ρ), ρ]`.
///
/// `S` must report [`Functional::spectral_gradient`]; otherwise the
/// unsupported-generator error is returned.
pub fn step_isospectral<H, S>(rho: &DensityMatrix, dt: f64, h: &H, s: &S) -> Result<DensityMatrix>
where
    H: Functional + ?Sized,
    S: Functional + ?Sized,
{
    let gen =
        |r: &DensityMatrix| -> Result<ComplexMatrix> { Ok(lax_generator(r, h, s)?.scale_real(dt)) };
    let f1 = gen(rho)?;
    let f2 = gen(&conjugate(rho, &f1.scale_real(0.5))?)?;
    let c12 = commutator(&f1, &f2)?;
    let f3 = gen(&conjugate(
        rho,
        &(&f2.scale_real(0.5) - &c12.scale_real(0.125)),
    )?)?;
    let f4 = gen(&conjugate(rho, &f3)?)?;
    let mean = (&(&(&f1 + &f2.scale_real(2.0)) + &f3.scale_real(2.0)) + &f4).scale_real(1.0 / 6.0);
    let v = &mean - &commutator(&f1, &f4)?.scale_real(1.0 / 12.0);
    conjugate(rho, &v)
}

pub fn step<H, S>(
    method: Method,
    rho: &DensityMatrix,
    dt: f64,
    h: &H,
    s: &S,
) -> Result<DensityMatrix>
where
    H: Functional + ?Sized,
    S: Functional + ?Sized,
{
    match method {
        Method::Rk4 => step_rk4(rho, dt, h, s),
        Method::Isospectral => step_isospectral(rho, dt, h, s),
    }
}

/// `e^{−iĤt} ρ₀ e^{iĤt}`.
pub fn linear_reference(
    rho0: &DensityMatrix,
    hamiltonian: &HermitianMatrix,
    t: f64,
) -> Result<DensityMatrix> {
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let u = hamiltonian.unitary_exp(t)?;
    Ok(DensityMatrix::from_hermitian_unchecked(
        rho0.conjugate_by(&u),
    ))
}

/// `dTr(F̂ρ)/dt = −i c₁ Tr(ρ^{α−1}[F̂, Ĥ])` under `H = Tr(Ĥρ)`, `S = S_α`.
pub fn observable_rate(
    observable: &HermitianMatrix,
    hamiltonian: &HermitianMatrix,
    rho: &DensityMatrix,
    alpha: f64,
) -> Result<f64> {
    let s = crate::functionals::renyi_a(alpha)?;
    observable_rate_with(observable, hamiltonian, rho, &s)
}

fn observable_rate_with(
    observable: &HermitianMatrix,
    hamiltonian: &HermitianMatrix,
    rho: &DensityMatrix,
    s: &RenyiA,
) -> Result<f64> {
    let c1 = s.rate_coefficient(rho)?;
    let p = crate::matrix::matrix_power(rho, s.alpha() - 1.0)?;
    let z = p.trace_product(&commutator(observable, hamiltonian)?);
    Ok(c1 * z.im)
}

/// Parameters of a fixed-step run.
#[derive(Clone, Copy)]
pub struct EvolutionSpec<'a> {
    pub h: &'a dyn Functional,
    pub s: &'a dyn Functional,
    pub t_end: f64,
    pub dt: f64,
    pub method: Method,
}

impl<'a> EvolutionSpec<'a> {
    pub fn new(
        h: &'a dyn Functional,
        s: &'a dyn Functional,
        t_end: f64,
        dt: f64,
        method: Method,
    ) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Domain(alloc::format!(
                "dt must be positive, got {dt}"
            )));
        }
        if !(t_end >= 0.0) || !t_end.is_finite() {
            return Err(Error::Domain(alloc::format!(
                "t_end must be >= 0, got {t_end}"
            )));
        }
        Ok(EvolutionSpec {
            h,
            s,
            t_end,
            dt,
            method,
        })
    }

    /// `round(t_end / dt)`.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

/// Conserved-quantity record for one time.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    pub t: f64,
    /// `C₁ … C₄`.
    pub casimirs: [f64; 4],
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub s_value: f64,
    pub h_value: f64,
    /// `‖ρ(t) − e^{−iĤt}ρ₀e^{iĤt}‖_max` when `H` is linear.
    pub linear_deviation: Option<f64>,
}

impl Diagnostics {
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(f64::NAN)
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    method: Method,
    times: Vec<f64>,
    states: Vec<DensityMatrix>,
    diagnostics: Vec<Diagnostics>,
}

impl Trajectory {
    pub fn method(&self) -> Method {
        self.method
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn diagnostics(&self) -> &[Diagnostics] {
        &self.diagnostics
    }

    pub fn final_state(&self) -> &DensityMatrix {
        self.states
            .last()
            .expect("trajectory holds the initial state")
    }

    fn max_drift(&self, f: impl Fn(&Diagnostics) -> f64) -> f64 {
        let first = f(&self.diagnostics[0]);
        self.diagnostics
            .iter()
            .map(|d| (f(d) - first).abs())
            .fold(0.0, f64::max)
    }

    /// `max_{t, n ≤ 4} |C_n(t) − C_n(0)|`.
    pub fn max_casimir_drift(&self) -> f64 {
        (0..4)
            .map(|n| self.max_drift(|d| d.casimirs[n]))
            .fold(0.0, f64::max)
    }

    /// `max_{t, k} |p_k(t) − p_k(0)|`.
    pub fn max_eigenvalue_drift(&self) -> f64 {
        let d = self.diagnostics[0].eigenvalues.len();
        (0..d)
            .map(|k| self.max_drift(|x| x.eigenvalues[k]))
            .fold(0.0, f64::max)
    }

    pub fn max_energy_drift(&self) -> f64 {
        self.max_drift(|d| d.h_value)
    }

    pub fn max_linear_deviation(&self) -> Option<f64> {
        self.diagnostics
            .iter()
            .map(|d| d.linear_deviation)
            .try_fold(0.0_f64, |m, x| x.map(|x| m.max(x)))
    }

    /// Most negative eigenvalue seen along the run.
    pub fn min_eigenvalue(&self) -> f64 {
        self.diagnostics
            .iter()
            .map(Diagnostics::min_eigenvalue)
            .fold(f64::INFINITY, f64::min)
    }
}

struct Recorder<'a> {
    spec: &'a EvolutionSpec<'a>,
    rho0: &'a DensityMatrix,
    linear: Option<Spectrum>,
}

impl Recorder<'_> {
    fn record(&self, t: f64, rho: &DensityMatrix) -> Result<Diagnostics> {
        let mut casimirs = [0.0; 4];
        for (n, c) in casimirs.iter_mut().enumerate() {
            *c = trace_power(rho, n as u32 + 1)?;
        }
        let linear_deviation = match &self.linear {
            Some(spec) => {
                let phases: Vec<C64> = spec
                    .values()
                    .iter()
                    .map(|&w| C64::from_polar(1.0, -w * t))
                    .collect();
                let u = spec.reassemble(&phases);
                let reference = self.rho0.conjugate_by(&u);
                Some((rho.as_matrix() - reference.as_matrix()).max_abs())
            }
            None => None,
        };
        Ok(Diagnostics {
            t,
            casimirs,
            eigenvalues: rho.eig()?.values().to_vec(),
            s_value: self.spec.s.value(rho)?,
            h_value: self.spec.h.value(rho)?,
            linear_deviation,
        })
    }
}

/// Integrates from `ρ₀` with `round(t_end/dt)` steps at `t_k = k·dt`,
/// recording diagnostics at every step including `t = 0`.
pub fn evolve(rho0: &DensityMatrix, spec: &EvolutionSpec<'_>) -> Result<Trajectory> {
    let linear = match spec.h.linear_operator() {
        Some(op) => Some(op.eig()?),
        None => None,
    };
    let recorder = Recorder { spec, rho0, linear };
    let n = spec.steps();
    let mut times = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    let mut diagnostics = Vec::with_capacity(n + 1);
    times.push(0.0);
    diagnostics.push(recorder.record(0.0, rho0)?);
    states.push(rho0.clone());
    for k in 1..=n {
        let at_step = |e: Error| match e {
            Error::NonFinite | Error::EigenNoConvergence { .. } => Error::NonFiniteStep { step: k },
            e => e,
        };
        let next = step(spec.method, &states[k - 1], spec.dt, spec.h, spec.s).map_err(at_step)?;
        if !next.is_finite() {
            return Err(Error::NonFiniteStep { step: k });
        }
        let t = k as f64 * spec.dt;
        diagnostics.push(recorder.record(t, &next).map_err(at_step)?);
        times.push(t);
        states.push(next);
    }
    Ok(Trajectory {
        method: spec.method,
        times,
        states,
        diagnostics,
    })
}

/// Column names and rows of the per-step diagnostics.
///
/// Columns: `t, C1..C4, p_1..p_d, S_value, H_value, linear_deviation`; the
/// deviation is NaN when `H` is not linear.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn diagnostics_table(traj: &Trajectory) -> DiagnosticsTable {
    let d = traj.diagnostics.first().map_or(0, |x| x.eigenvalues.len());
    let mut header: Vec<String> = ["t", "C1", "C2", "C3", "C4"]
        .iter()
        .map(|s| String::from(*s))
        .collect();
    header.extend((1..=d).map(|k| alloc::format!("p_{k}")));
    header.extend(
        ["S_value", "H_value", "linear_deviation"]
            .iter()
            .map(|s| String::from(*s)),
    );
    let rows = traj
        .diagnostics
        .iter()
        .map(|x| {
            let mut row = Vec::with_capacity(header.len());
            row.push(x.t);
            row.extend_from_slice(&x.casimirs);
            row.extend_from_slice(&x.eigenvalues);
            row.extend([x.s_value, x.h_value, x.linear_deviation.unwrap_or(f64::NAN)]);
            row
        })
        .collect();
    DiagnosticsTable { header, rows }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::{
        casimir, linear_observable, quadratic_observable, renyi_a, CasimirFunction, CasimirPreset,
    };
    use crate::matrix::{random_density, random_hermitian};

    fn c2_half() -> CasimirFunction {
        CasimirFunction::preset(CasimirPreset::C2Half)
    }

    fn max_diff(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
        (a.as_matrix() - b.as_matrix()).max_abs()
    }

    #[test]
    fn rk4_linear_local_error_is_fifth_order() {
        let rho = random_density(3, 3, 1).unwrap();
        let hop = random_hermitian(3, 2);
        let h = linear_observable(hop.clone());
        let err = |dt: f64| {
            max_diff(
                &step_rk4(&rho, dt, &h, &c2_half()).unwrap(),
                &linear_reference(&rho, &hop, dt).unwrap(),
            )
        };
        let ratio = err(1e-2) / err(5e-3);
        assert!(ratio > 28.0, "ratio {ratio}");
    }

    #[test]
    fn stationary_state_is_fixed() {
        let rho = DensityMatrix::from_real_diagonal(&[0.5, 0.3, 0.2]).unwrap();
        let h = linear_observable(HermitianMatrix::from_real_diagonal(&[1.0, -2.0, 0.5]));
        for method in [Method::Rk4, Method::Isospectral] {
            let out = step(method, &rho, 0.1, &h, &renyi_a(3.0).unwrap()).unwrap();
            assert!(max_diff(&out, &rho) <= 1e-14);
        }
    }

    #[test]
    fn rk4_pure_renyi_step_is_linear() {
        let rho = random_density(3, 1, 4).unwrap();
        let hop = random_hermitian(3, 5);
        let out = step_rk4(
            &rho,
            1e-3,
            &linear_observable(hop.clone()),
            &renyi_a(3.0).unwrap(),
        )
        .unwrap();
        assert!(max_diff(&out, &linear_reference(&rho, &hop, 1e-3).unwrap()) <= 1e-10);
    }

    #[test]
    fn identity_phi_gives_exact_conjugation() {
        let rho = random_density(4, 4, 6).unwrap();
        let hop = random_hermitian(4, 7);
        let h = linear_observable(hop.clone());
        let b = lax_generator(&rho, &h, &c2_half()).unwrap();
        assert!((&b - &hop.as_matrix().scale(MINUS_I)).max_abs() < 1e-12);
        let out = step_isospectral(&rho, 0.05, &h, &c2_half()).unwrap();
        assert!(max_diff(&out, &linear_reference(&rho, &hop, 0.05).unwrap()) < 1e-13);
    }

    #[test]
    fn pure_state_steps_are_exact_conjugations() {
        let rho = random_density(4, 1, 3).unwrap();
        let hop = random_hermitian(4, 4);
        let h = linear_observable(hop.clone());
        for alpha in [1.5, 3.0, 4.0] {
            let out = step_isospectral(&rho, 0.1, &h, &renyi_a(alpha).unwrap()).unwrap();
            assert!(max_diff(&out, &linear_reference(&rho, &hop, 0.1).unwrap()) < 1e-13);
        }
    }

    #[test]
    fn isospectral_keeps_spectrum_over_many_steps() {
        let mut rho = random_density(4, 4, 8).unwrap();
        let p0 = rho.eig().unwrap().values().to_vec();
        let h = linear_observable(random_hermitian(4, 9));
        let s = renyi_a(3.0).unwrap();
        for _ in 0..1000 {
            rho = step_isospectral(&rho, 0.01, &h, &s).unwrap();
        }
        let p = rho.eig().unwrap().values().to_vec();
        let drift = p
            .iter()
            .zip(&p0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(drift <= 1e-12, "drift {drift:e}");
    }

    #[test]
    fn isospectral_agrees_with_fine_rk4() {
        let rho0 = random_density(2, 2, 10).unwrap();
        let h = linear_observable(random_hermitian(2, 11));
        let s = renyi_a(3.0).unwrap();
        let fine = evolve(
            &rho0,
            &EvolutionSpec::new(&h, &s, 1.0, 1e-4, Method::Rk4).unwrap(),
        )
        .unwrap();
        let iso = evolve(
            &rho0,
            &EvolutionSpec::new(&h, &s, 1.0, 1e-3, Method::Isospectral).unwrap(),
        )
        .unwrap();
        assert!(max_diff(fine.final_state(), iso.final_state()) <= 1e-6);
    }

    #[test]
    fn non_spectral_generator_is_rejected() {
        let rho = random_density(2, 2, 1).unwrap();
        let h = linear_observable(random_hermitian(2, 1));
        let s = quadratic_observable(random_hermitian(2, 2));
        assert!(matches!(
            step_isospectral(&rho, 0.1, &h, &s),
            Err(Error::UnsupportedGenerator(_))
        ));
        assert!(step_rk4(&rho, 0.1, &h, &s).is_ok());
    }

    #[test]
    fn linear_reference_examples() {
        let rho = DensityMatrix::from_real_diagonal(&[1.0, 0.0]).unwrap();
        let (o, z) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        let sx = HermitianMatrix::new(
            ComplexMatrix::from_rows(&[alloc::vec![z, o], alloc::vec![o, z]]).unwrap(),
        )
        .unwrap();
        let flipped = linear_reference(&rho, &sx, core::f64::consts::FRAC_PI_2).unwrap();
        assert!((flipped[(1, 1)].re - 1.0).abs() < 1e-15 && flipped[(0, 0)].norm() < 1e-15);
        assert_eq!(linear_reference(&rho, &sx, 0.0).unwrap(), rho);
    }

    #[test]
    fn observable_rate_examples() {
        let rho = random_density(3, 3, 12).unwrap();
        let hop = random_hermitian(3, 13);
        assert!(
            observable_rate(&HermitianMatrix::identity(3), &hop, &rho, 3.0)
                .unwrap()
                .abs()
                < 1e-14
        );
        assert!(observable_rate(&hop, &hop, &rho, 3.0).unwrap().abs() < 1e-14);
        assert!(observable_rate(&hop, &hop, &rho, 1.0).is_err());

        let f = random_hermitian(3, 14);
        let rate = observable_rate(&f, &hop, &rho, 3.0).unwrap();
        let h = linear_observable(hop);
        let dot = crate::brackets::nambu_rhs(&h, &renyi_a(3.0).unwrap(), &rho).unwrap();
        assert!((rate - f.expectation(dot.as_matrix())).abs() < 1e-12);
    }

    #[test]
    fn evolve_records_every_step() {
        let rho0 = random_density(3, 2, 15).unwrap();
        let h = linear_observable(random_hermitian(3, 16));
        let s = casimir(2).unwrap();
        let spec = EvolutionSpec::new(&h, &s, 0.1, 0.03, Method::Rk4).unwrap();
        let traj = evolve(&rho0, &spec).unwrap();
        assert_eq!(traj.times().len(), 4);
        assert!((traj.times()[3] - 0.09).abs() < 1e-15);
        let table = diagnostics_table(&traj);
        assert_eq!(table.header.len(), 5 + 3 + 3);
        assert_eq!(table.header[5], "p_1");
        assert_eq!(table.rows.len(), 4);
        assert!(EvolutionSpec::new(&h, &s, 1.0, 0.0, Method::Rk4).is_err());
        assert!(EvolutionSpec::new(&h, &s, -1.0, 0.1, Method::Rk4).is_err());
    }

    #[test]
    fn nan_aborts_with_step_index() {
        let rho0 = random_density(2, 2, 1).unwrap();
        let bad = HermitianMatrix::from_real_diagonal(&[1e308, -1e308]);
        let h = linear_observable(bad);
        let s = casimir(4).unwrap();
        let spec = EvolutionSpec::new(&h, &s, 1.0, 1e10, Method::Rk4).unwrap();
        let r = evolve(
            &rho0,
            &EvolutionSpec {
                t_end: 3e10,
                ..spec
            },
        );
        assert!(matches!(r, Err(Error::NonFiniteStep { step: 1 })), "{r:?}");
    }
}
