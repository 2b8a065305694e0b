use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Entry count does not describe a square matrix.
    NotSquare {
        rows: usize,
        cols: usize,
    },
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    /// Largest `|M_ij − conj(M_ji)|` exceeded the Hermitian tolerance.
    NotHermitian {
        max_asymmetry: f64,
    },
    /// Smallest eigenvalue fell below the PSD tolerance.
    NotPositive {
        min_eigenvalue: f64,
    },
    NonPositiveTrace {
        trace: f64,
    },
    NonFinite,
    /// Jacobi sweeps did not reduce the off-diagonal mass.
    EigenNoConvergence {
        norm: f64,
        sweeps: usize,
    },
    /// A parameter is outside the domain of the operation.
    Domain(String),
    /// A Rényi generator was evaluated where `Tr ρ^α = 0`.
    DegenerateState,
    /// A computation that must be real returned an imaginary residue.
    Consistency(String),
    /// The isospectral stepper needs `∇S` to commute with `ρ`.
    UnsupportedGenerator(String),
    /// The integrator produced NaN/Inf at the given step.
    NonFiniteStep {
        step: usize,
    },
    Precondition(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotSquare { rows, cols } => write!(f, "matrix is not square: {rows}x{cols}"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NotHermitian { max_asymmetry } => {
                write!(f, "matrix is not Hermitian (max |M - M^dag| = {max_asymmetry:e})")
            }
            Error::NotPositive { min_eigenvalue } => {
                write!(f, "matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")
            }
            Error::NonPositiveTrace { trace } => write!(f, "trace must be positive, got {trace:e}"),
            Error::NonFinite => f.write_str("matrix has non-finite entries"),
            Error::EigenNoConvergence { norm, sweeps } => write!(
                f,
                "Jacobi eigensolver did not converge after {sweeps} sweeps (matrix max norm {norm:e})"
            ),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::DegenerateState => f.write_str("degenerate state: Tr(rho^alpha) = 0"),
            Error::Consistency(msg) => write!(f, "internal consistency error: {msg}"),
            Error::UnsupportedGenerator(msg) => write!(f, "unsupported generator: {msg}"),
            Error::NonFiniteStep { step } => write!(f, "non-finite state at step {step}"),
            Error::Precondition(msg) => write!(f, "precondition violated: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
