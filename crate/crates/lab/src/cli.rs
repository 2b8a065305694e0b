//! The `nambu` command line.
//!
//! Every subcommand prints a JSON report on stdout and a one-line summary on
//! stderr. Exit status: 0 when every check passes, 1 on a failed check or a
//! numerical failure, 2 on malformed input.

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nambu_core::brackets::{
    antisymmetry_residual, bracket_via_tensor, casimir_via_tensor, cyclic_trace_tensor,
    jacobi_residual, lie_nambu, structure_tensor,
};
use nambu_core::dirac::{
    dirac_hamiltonian, dispersion_grid, dispersion_residual, evolve_modes,
    hamilton_equations_check, identity_residuals, mode_norm, FourVector, SpinorMode,
};
use nambu_core::dynamics::{diagnostics_table, evolve, DiagnosticsTable, EvolutionSpec, Method};
use nambu_core::functionals::{
    casimir, gradient_check_seeded, linear_observable, quadratic_observable, renyi_a, renyi_b,
    CasimirFunction, CasimirPreset, Functional, FunctionalKind,
};
use nambu_core::matrix::{
    random_complex_vector, random_density, random_full_rank_density, random_hermitian, seeded_rng,
    trace_power,
};
use nambu_core::multipartite::{
    interacting_generator_gap, nosignal_bracket_test, overlapping_bracket_control,
    subsystem_generator_test,
};
use nambu_core::{DensityMatrix, HermitianMatrix, Spectrum, C64};
use serde::Serialize;

use crate::descriptor::load_functional;
use crate::matrix_json::{load_density, load_matrix};
use crate::trajectory_csv::save_table;
use crate::IoError;

#[derive(Debug, Parser)]
#[command(
    name = "nambu",
    version,
    about = "Triple-bracket density-matrix dynamics and 2-spinor Dirac checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Perturbation added to the computed artifact before the tolerance checks.
    #[arg(
        long,
        global = true,
        hide = true,
        default_value_t = 0.0,
        allow_negative_numbers = true
    )]
    pub inject: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate rho' = -i[grad H, grad S] and write the diagnostics CSV.
    Evolve(EvolveArgs),
    /// Brackets of observables on disjoint subsystems.
    Nosignal(NosignalArgs),
    /// Structure-constant identities of u(d).
    Algebra(AlgebraArgs),
    /// 2-spinor Dirac mode checks.
    Dirac(DiracArgs),
    /// Finite-difference validation of a functional gradient.
    Gradcheck(GradcheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Entropy {
    RenyiA,
    RenyiB,
    /// `S = Tr(rho^2)/2`, the von Neumann case.
    CasimirHalf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Isospectral,
    Rk4,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[arg(long, default_value_t = 4)]
    pub dim: usize,
    #[arg(long, default_value_t = 3.0)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = Entropy::RenyiA)]
    pub entropy: Entropy,
    #[arg(long, value_enum, default_value_t = MethodArg::Isospectral)]
    pub method: MethodArg,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    #[arg(long, default_value_t = 10.0)]
    pub t_end: f64,
    /// Required unless both --rho and --hamiltonian are given.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Rank of the random initial state (default: full rank).
    #[arg(long)]
    pub rank: Option<usize>,
    /// Initial state as a matrix JSON file.
    #[arg(long)]
    pub rho: Option<PathBuf>,
    /// Hamiltonian operator as a matrix JSON file.
    #[arg(long)]
    pub hamiltonian: Option<PathBuf>,
    /// Trajectory CSV output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NosignalArgs {
    #[arg(long, value_delimiter = ',', num_args = 1, default_value = "2,2")]
    pub dims: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct AlgebraArgs {
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DiracCheck {
    Identities,
    Dispersion,
    Evolve,
    Hamilton,
}

#[derive(Debug, Args)]
pub struct DiracArgs {
    #[arg(long, value_enum)]
    pub check: DiracCheck,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    /// Spatial wave vector `x,y,z`.
    #[arg(
        long,
        value_delimiter = ',',
        num_args = 1,
        allow_hyphen_values = true,
        default_value = "0.3,-1.2,0.7"
    )]
    pub k: Vec<f64>,
    #[arg(long, default_value_t = 100.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Linear,
    Quadratic,
    Casimir,
    RenyiA,
    RenyiB,
    CasimirFunction,
}

#[derive(Debug, Args)]
pub struct GradcheckArgs {
    /// Functional descriptor JSON; overrides --kind.
    #[arg(long)]
    pub functional: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = KindArg::RenyiA)]
    pub kind: KindArg,
    #[arg(long, default_value_t = 2.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 2)]
    pub n: u32,
    #[arg(long, default_value = "c2sq_plus_c3")]
    pub phi: String,
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    #[arg(long, default_value_t = 20)]
    pub states: usize,
    #[arg(long, default_value_t = 1e-5)]
    pub eps: f64,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl RunError {
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Usage(_) | RunError::Io(_) => 2,
            RunError::Numerical(_) => 1,
        }
    }
}

impl From<nambu_core::Error> for RunError {
    fn from(e: nambu_core::Error) -> Self {
        use nambu_core::Error as E;
        match e {
            E::Domain(_)
            | E::DimensionMismatch { .. }
            | E::NotSquare { .. }
            | E::Precondition(_) => RunError::Usage(e.to_string()),
            e => RunError::Numerical(e.to_string()),
        }
    }
}

/// A measured residual and its bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    /// `value <= bound`, or `value >= bound` when `at_least`.
    pub bound: f64,
    pub at_least: bool,
    pub pass: bool,
}

fn at_most(name: &'static str, value: f64, bound: f64) -> Check {
    Check {
        name,
        value,
        bound,
        at_least: false,
        pass: value <= bound,
    }
}

fn at_least(name: &'static str, value: f64, bound: f64) -> Check {
    Check {
        name,
        value,
        bound,
        at_least: true,
        pass: value >= bound,
    }
}

/// Result of one subcommand.
#[derive(Debug)]
pub struct Outcome {
    pub subcommand: &'static str,
    pub report: String,
    pub checks: Vec<Check>,
}

impl Outcome {
    fn new<R: Serialize>(subcommand: &'static str, report: &R, checks: Vec<Check>) -> Self {
        let report = serde_json::to_string(report).expect("report serializes");
        Outcome {
            subcommand,
            report,
            checks,
        }
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn summary(&self) -> String {
        let parts: Vec<String> = self
            .checks
            .iter()
            .map(|c| {
                format!(
                    "{}={:.3e} ({}{:.0e})",
                    c.name,
                    c.value,
                    if c.at_least { ">=" } else { "<=" },
                    c.bound
                )
            })
            .collect();
        let status = if self.pass() { "PASS" } else { "FAIL" };
        format!("{}: {status} {}", self.subcommand, parts.join(" "))
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, RunError> {
    if !cli.inject.is_finite() {
        return Err(RunError::Usage("--inject must be finite".into()));
    }
    match &cli.command {
        Command::Evolve(a) => run_evolve(a, cli.inject),
        Command::Nosignal(a) => run_nosignal(a, cli.inject),
        Command::Algebra(a) => run_algebra(a, cli.inject),
        Command::Dirac(a) => run_dirac(a, cli.inject),
        Command::Gradcheck(a) => run_gradcheck(a, cli.inject),
    }
}

/// Parses `args`, runs, prints the report and returns the exit status.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            println!("{}", outcome.report);
            eprintln!("{}", outcome.summary());
            ExitCode::from(u8::from(!outcome.pass()))
        }
        Err(e) => {
            eprintln!("nambu: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[derive(Serialize)]
struct EvolveReport<'a> {
    subcommand: &'static str,
    dim: usize,
    entropy: &'static str,
    alpha: f64,
    method: &'static str,
    dt: f64,
    t_end: f64,
    steps: usize,
    seed: Option<u64>,
    max_casimir_drift: f64,
    max_eigenvalue_drift: f64,
    max_linear_deviation: f64,
    min_eigenvalue: f64,
    psd_violation: bool,
    checks: &'a [Check],
    pass: bool,
}

const PSD_REPORT_TOL: f64 = 1e-8;

fn column_drift(table: &DiagnosticsTable, cols: std::ops::Range<usize>) -> f64 {
    let first = &table.rows[0];
    table
        .rows
        .iter()
        .flat_map(|r| cols.clone().map(move |c| (r[c] - first[c]).abs()))
        .fold(0.0, f64::max)
}

fn run_evolve(a: &EvolveArgs, inject: f64) -> Result<Outcome, RunError> {
    let need_seed = a.rho.is_none() || a.hamiltonian.is_none();
    let seed = match (a.seed, need_seed) {
        (None, true) => {
            return Err(RunError::Usage(
                "--seed is required for a randomized run".into(),
            ))
        }
        (s, _) => s,
    };
    let base = seed.unwrap_or(0);
    let rho0 = match &a.rho {
        Some(p) => load_density(p)?,
        None => {
            let rank = a.rank.unwrap_or(a.dim);
            random_density(a.dim, rank, base)?
        }
    };
    let d = rho0.dim();
    let h_op = match &a.hamiltonian {
        Some(p) => load_matrix(p)?,
        None => random_hermitian(d, base.wrapping_add(1)),
    };
    if h_op.dim() != d {
        return Err(RunError::Usage(format!(
            "Hamiltonian is {}x{0}, state is {d}x{d}",
            h_op.dim()
        )));
    }
    let h = linear_observable(h_op);
    let s: Box<dyn Functional> = match a.entropy {
        Entropy::RenyiA => Box::new(renyi_a(a.alpha)?),
        Entropy::RenyiB => Box::new(renyi_b(a.alpha)?),
        Entropy::CasimirHalf => Box::new(CasimirFunction::preset(CasimirPreset::C2Half)),
    };
    let method = match a.method {
        MethodArg::Isospectral => Method::Isospectral,
        MethodArg::Rk4 => Method::Rk4,
    };
    let spec = EvolutionSpec::new(&h, s.as_ref(), a.t_end, a.dt, method)?;
    let traj = evolve(&rho0, &spec).map_err(|e| match e {
        nambu_core::Error::NonFiniteStep { step } => RunError::Numerical(format!(
            "non-finite state at step {step} (t = {})",
            step as f64 * a.dt
        )),
        e => e.into(),
    })?;

    let mut table = diagnostics_table(&traj);
    if inject != 0.0 {
        let last = table.rows.len() - 1;
        table.rows[last][1] += inject;
        table.rows[last][5] += inject;
    }
    let max_casimir_drift = column_drift(&table, 1..5);
    let max_eigenvalue_drift = column_drift(&table, 5..5 + d);
    let dev_col = table.header.len() - 1;
    let max_linear_deviation = table.rows.iter().map(|r| r[dev_col]).fold(0.0, f64::max);
    let min_eigenvalue = table
        .rows
        .iter()
        .map(|r| r[5])
        .fold(f64::INFINITY, f64::min);

    let tol = if method == Method::Isospectral {
        1e-10
    } else {
        1e-6
    };
    let mut checks = vec![
        at_most("casimir_drift", max_casimir_drift, tol),
        at_most("eigenvalue_drift", max_eigenvalue_drift, tol),
    ];
    let pure = trace_power(&rho0, 2)? >= rho0.trace_real().powi(2) * (1.0 - 1e-12);
    let linear_expected = match a.entropy {
        Entropy::CasimirHalf => true,
        Entropy::RenyiA => a.alpha == 2.0 || pure,
        Entropy::RenyiB => false,
    };
    if linear_expected {
        checks.push(at_most("linear_deviation", max_linear_deviation, 1e-8));
    }
    if let Some(path) = &a.out {
        save_table(path, &table)?;
    }
    let report = EvolveReport {
        subcommand: "evolve",
        dim: d,
        entropy: match a.entropy {
            Entropy::RenyiA => "renyi-a",
            Entropy::RenyiB => "renyi-b",
            Entropy::CasimirHalf => "casimir-half",
        },
        alpha: a.alpha,
        method: method.name(),
        dt: a.dt,
        t_end: a.t_end,
        steps: spec.steps(),
        seed,
        max_casimir_drift,
        max_eigenvalue_drift,
        max_linear_deviation,
        min_eigenvalue,
        psd_violation: min_eigenvalue < -PSD_REPORT_TOL,
        pass: checks.iter().all(|c| c.pass),
        checks: &checks,
    };
    let out = Outcome::new("evolve", &report, checks.clone());
    Ok(out)
}

#[derive(Serialize)]
struct NosignalReport {
    dims: [usize; 2],
    trials: usize,
    max_bracket: f64,
    max_generator_gap: f64,
    control_overlapping: f64,
    control_interacting: f64,
    seed: u64,
    pass: bool,
}

fn run_nosignal(a: &NosignalArgs, inject: f64) -> Result<Outcome, RunError> {
    let &[d1, d2] = a.dims.as_slice() else {
        return Err(RunError::Usage(format!(
            "--dims takes two sizes, got {}",
            a.dims.len()
        )));
    };
    if d1 < 2 || d2 < 2 {
        return Err(RunError::Usage("subsystem dimensions must be >= 2".into()));
    }
    let dims = (d1, d2);
    let max_bracket = nosignal_bracket_test(dims, a.trials, a.seed)? + inject.abs();
    let control_overlapping = overlapping_bracket_control(dims, a.trials, a.seed)?;
    let (hi, hii) = (
        random_hermitian(d1, a.seed.wrapping_add(1)),
        random_hermitian(d2, a.seed.wrapping_add(2)),
    );
    let coupling = random_hermitian(d1 * d2, a.seed.wrapping_add(3));
    let s = renyi_a(3.0)?;
    let max_generator_gap = if inject == 0.0 {
        subsystem_generator_test(dims, &hi, &hii, &s, a.seed)?
    } else {
        interacting_generator_gap(dims, &hi, &hii, Some(&coupling.scale(inject)), &s, a.seed)?
    };
    let control_interacting =
        interacting_generator_gap(dims, &hi, &hii, Some(&coupling), &s, a.seed)?;
    let checks = vec![
        at_most("max_bracket", max_bracket, 1e-10),
        at_most("max_generator_gap", max_generator_gap, 1e-10),
        at_least("control_overlapping", control_overlapping, 1e-3),
        at_least("control_interacting", control_interacting, 1e-3),
    ];
    let report = NosignalReport {
        dims: [d1, d2],
        trials: a.trials,
        max_bracket,
        max_generator_gap,
        control_overlapping,
        control_interacting,
        seed: a.seed,
        pass: checks.iter().all(|c| c.pass),
    };
    Ok(Outcome::new("nosignal", &report, checks))
}

#[derive(Serialize)]
struct AlgebraReport {
    d: usize,
    jacobi_residual: f64,
    antisymmetry_residual: f64,
    tensor_vs_matrix_max: f64,
    cyclic_casimir_max: Option<f64>,
    seed: u64,
    pass: bool,
}

/// Seeded probes per dimension for the tensor-vs-matrix comparison.
const ALGEBRA_TRIALS: u64 = 5;

fn run_algebra(a: &AlgebraArgs, inject: f64) -> Result<Outcome, RunError> {
    let d = a.dim;
    let mut t = structure_tensor(d)?;
    if inject != 0.0 {
        t.perturb_mixed(0, 1, 2, inject);
    }
    let jac = jacobi_residual(&t);
    let anti = antisymmetry_residual(&t);
    let mut gap: f64 = 0.0;
    for trial in 0..ALGEBRA_TRIALS {
        let seed = a.seed.wrapping_mul(31).wrapping_add(3 * trial);
        let rho = random_density(d, d, seed)?;
        let f = linear_observable(random_hermitian(d, seed.wrapping_add(1)));
        let g = quadratic_observable(random_hermitian(d, seed.wrapping_add(2)));
        let h = renyi_a(3.0)?;
        gap = gap
            .max((bracket_via_tensor(&f, &g, &h, &rho, &t)? - lie_nambu(&f, &g, &h, &rho)?).abs());
    }
    let cyclic = if d <= 3 {
        let rho = random_density(d, d, a.seed)?;
        let mut worst: f64 = 0.0;
        for n in 1..=4 {
            let tn = cyclic_trace_tensor(d, n)?;
            worst =
                worst.max((casimir_via_tensor(&tn, &rho)? - trace_power(&rho, n as u32)?).abs());
        }
        Some(worst)
    } else {
        None
    };
    let mut checks = vec![
        at_most("jacobi_residual", jac, 1e-12),
        at_most("antisymmetry_residual", anti, 1e-12),
        at_most("tensor_vs_matrix_max", gap, 1e-10),
    ];
    if let Some(c) = cyclic {
        checks.push(at_most("cyclic_casimir_max", c, 1e-10));
    }
    let report = AlgebraReport {
        d,
        jacobi_residual: jac,
        antisymmetry_residual: anti,
        tensor_vs_matrix_max: gap,
        cyclic_casimir_max: cyclic,
        seed: a.seed,
        pass: checks.iter().all(|c| c.pass),
    };
    Ok(Outcome::new("algebra", &report, checks))
}

#[derive(Serialize)]
struct DiracReport {
    check: &'static str,
    mass: f64,
    k: [f64; 3],
    residual: f64,
    tolerance: f64,
    details: Vec<(&'static str, f64)>,
    pass: bool,
}

fn eigenmodes(k: [f64; 3], mass: f64) -> Result<Vec<SpinorMode>, RunError> {
    let spec = dirac_hamiltonian(k, mass, &FourVector::rest())?.spectrum()?;
    Ok((0..4)
        .map(|c| {
            let col: Vec<C64> = (0..4).map(|r| spec.modes[(r, c)]).collect();
            SpinorMode::from_vector(k, &col)
        })
        .collect())
}

fn run_dirac(a: &DiracArgs, inject: f64) -> Result<Outcome, RunError> {
    let &[kx, ky, kz] = a.k.as_slice() else {
        return Err(RunError::Usage(format!(
            "--k takes three components, got {}",
            a.k.len()
        )));
    };
    let k = [kx, ky, kz];
    let rest = FourVector::rest();
    let (name, tolerance, mut residual, details) = match a.check {
        DiracCheck::Identities => {
            let r = identity_residuals();
            let details = vec![
                ("iw1", r.iw1),
                ("iw2", r.iw2),
                ("id1", r.id1),
                ("id2", r.id2),
                ("gs1", r.gs1),
                ("gs2", r.gs2),
                ("self_dual", r.self_dual),
                ("anti_self_dual", r.anti_self_dual),
                ("antisymmetry", r.antisymmetry),
                ("slicing", r.slicing),
            ];
            ("identities", 1e-13, r.max(), details)
        }
        DiracCheck::Dispersion => {
            let mut worst = dispersion_residual(k, a.mass, &rest)?;
            for q in dispersion_grid() {
                worst = worst.max(dispersion_residual(q, a.mass, &rest)?);
            }
            ("dispersion", 1e-10, worst, vec![("grid_points", 28.0)])
        }
        DiracCheck::Evolve => {
            if a.t_end.is_nan() || a.t_end < 0.0 {
                return Err(RunError::Usage("--t-end must be >= 0".into()));
            }
            let amps = random_complex_vector(&mut seeded_rng(a.seed), 4);
            let ensemble: Vec<(SpinorMode, C64)> =
                eigenmodes(k, a.mass)?.into_iter().zip(amps).collect();
            let start: Vec<SpinorMode> = evolve_modes(&ensemble, a.mass, 0.0)?;
            let n0 = mode_norm(&start, a.mass, &rest)?;
            let mut worst: f64 = 0.0;
            for i in 1..=10 {
                let t = a.t_end * i as f64 / 10.0;
                worst = worst.max(
                    (mode_norm(&evolve_modes(&ensemble, a.mass, t)?, a.mass, &rest)? - n0).abs()
                        / n0,
                );
            }
            (
                "evolve",
                1e-12,
                worst,
                vec![("initial_norm", n0), ("t_end", a.t_end)],
            )
        }
        DiracCheck::Hamilton => {
            let mut rng = seeded_rng(a.seed);
            let modes: Vec<SpinorMode> = (0..5)
                .map(|_| SpinorMode::from_vector(k, &random_complex_vector(&mut rng, 4)))
                .collect();
            let r = hamilton_equations_check(&modes, a.mass)?;
            ("hamilton", 1e-6, r, vec![("modes", 5.0)])
        }
    };
    residual += inject.abs();
    let checks = vec![at_most(name, residual, tolerance)];
    let report = DiracReport {
        check: name,
        mass: a.mass,
        k,
        residual,
        tolerance,
        details,
        pass: checks[0].pass,
    };
    Ok(Outcome::new("dirac", &report, checks))
}

/// Adds `shift·1` to the gradient of `inner`.
struct ShiftedGradient {
    inner: Box<dyn Functional>,
    shift: f64,
}

impl Functional for ShiftedGradient {
    fn kind(&self) -> FunctionalKind {
        self.inner.kind()
    }
    fn value(&self, rho: &DensityMatrix) -> nambu_core::Result<f64> {
        self.inner.value(rho)
    }
    fn gradient(&self, rho: &DensityMatrix) -> nambu_core::Result<HermitianMatrix> {
        Ok(self.inner.gradient(rho)?.add_identity(self.shift))
    }
    fn spectral_gradient(
        &self,
        _rho: &DensityMatrix,
        _spec: &Spectrum,
    ) -> Option<nambu_core::Result<Vec<f64>>> {
        None
    }
}

#[derive(Serialize)]
struct GradcheckReport {
    kind: String,
    dim: usize,
    states: usize,
    eps: f64,
    max_error: f64,
    tolerance: f64,
    seed: u64,
    pass: bool,
}

fn run_gradcheck(a: &GradcheckArgs, inject: f64) -> Result<Outcome, RunError> {
    if a.states == 0 {
        return Err(RunError::Usage("--states must be >= 1".into()));
    }
    let (f, label, d): (Box<dyn Functional>, String, usize) = match &a.functional {
        Some(path) => {
            let desc = load_functional(path)?;
            let f = desc
                .build()
                .map_err(|m| RunError::Usage(format!("{}: {m}", path.display())))?;
            let d = desc.dim().unwrap_or(a.dim);
            let label = format!("{:?}", f.kind());
            (f, label, d)
        }
        None => {
            let d = a.dim;
            let op = || random_hermitian(d, a.seed.wrapping_add(7));
            let f: Box<dyn Functional> = match a.kind {
                KindArg::Linear => Box::new(linear_observable(op())),
                KindArg::Quadratic => Box::new(quadratic_observable(op())),
                KindArg::Casimir => Box::new(casimir(a.n)?),
                KindArg::RenyiA => Box::new(renyi_a(a.alpha)?),
                KindArg::RenyiB => Box::new(renyi_b(a.alpha)?),
                KindArg::CasimirFunction => {
                    let p = CasimirPreset::from_name(&a.phi).ok_or_else(|| {
                        RunError::Usage(format!("unknown phi preset \"{}\"", a.phi))
                    })?;
                    Box::new(CasimirFunction::preset(p))
                }
            };
            let label = format!("{:?}", f.kind());
            (f, label, d)
        }
    };
    let f = ShiftedGradient {
        inner: f,
        shift: inject,
    };
    let mut worst: f64 = 0.0;
    for i in 0..a.states as u64 {
        let rho = random_full_rank_density(d, a.seed.wrapping_add(i))?;
        worst = worst.max(gradient_check_seeded(
            &f,
            &rho,
            a.eps,
            a.seed.wrapping_add(i),
        )?);
    }
    let checks = vec![at_most("max_error", worst, 1e-6)];
    let report = GradcheckReport {
        kind: label,
        dim: d,
        states: a.states,
        eps: a.eps,
        max_error: worst,
        tolerance: 1e-6,
        seed: a.seed,
        pass: checks[0].pass,
    };
    Ok(Outcome::new("gradcheck", &report, checks))
}
