use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
///
/// `code()` gives a stable machine-readable tag used by the CLI reports and
/// `status()` a stable integer used across the C ABI.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("omega is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },
    #[error("kappa is not symmetric (residual {residual:.3e})")]
    NotSymmetric { residual: f64 },
    #[error("Kraus operators are linearly dependent: ker(V*) and ker(U^T) intersect (rank {rank} < {m})")]
    DependentKraus { rank: usize, m: usize },
    #[error("too many Kraus operators: m = {m} exceeds 2d = {max}")]
    TooManyKraus { m: usize, max: usize },
    #[error("drift is not stable (spectral abscissa {abscissa:.6e})")]
    Unstable { abscissa: f64 },
    #[error("Lyapunov system is numerically singular")]
    SingularLyapunov,
    #[error("matrix is not positive definite (smallest eigenvalue {min_eig:.3e})")]
    NotPositiveDefinite { min_eig: f64 },
    #[error("invariant state is not faithful (smallest symplectic eigenvalue {min_sigma:.12})")]
    NotFaithful { min_sigma: f64 },
    #[error("no faithful invariant state for these parameters")]
    NoFaithfulState,
    #[error("time must be finite and non-negative, got {0}")]
    InvalidTime(f64),
    #[error("quadratic form {0:.3e} exceeds the exponent range")]
    RangeExceeded(f64),
    #[error("Weyl combination has no terms")]
    EmptyCombo,
    #[error("test rate {omega_test} must be strictly below omega0 = {omega0}")]
    InvalidTestRate { omega_test: f64, omega0: f64 },
    #[error("the two routes for {what} disagree by {diff:.3e}")]
    RouteMismatch { what: &'static str, diff: f64 },
    #[error("norm evaluates to a non-real value (imaginary part {0:.3e})")]
    NonRealNorm(f64),
    #[error("Kraus coefficients are not real")]
    NotRealCoefficients,
    #[error("Hamiltonian does not commute with the position algebra")]
    NonCommutingHamiltonian,
    #[error("diffusion matrix is degenerate (smallest eigenvalue {min_eig:.3e})")]
    DegenerateDiffusion { min_eig: f64 },
    #[error("only one-dimensional generators are supported here, got d = {0}")]
    NotOneDimensional(usize),
    #[error("truncated space dimension {dim} exceeds the limit {limit}")]
    DimensionTooLarge { dim: usize, limit: usize },
    #[error("model is outside the oracle envelope: {0}")]
    OutsideEnvelope(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "DIMENSION_MISMATCH",
            Error::NonFinite(_) => "NON_FINITE",
            Error::NotHermitian { .. } => "NOT_HERMITIAN",
            Error::NotSymmetric { .. } => "NOT_SYMMETRIC",
            Error::DependentKraus { .. } => "DEPENDENT_KRAUS",
            Error::TooManyKraus { .. } => "TOO_MANY_KRAUS",
            Error::Unstable { .. } => "UNSTABLE",
            Error::SingularLyapunov => "SINGULAR_LYAPUNOV",
            Error::NotPositiveDefinite { .. } => "NOT_POSITIVE_DEFINITE",
            Error::NotFaithful { .. } => "NOT_FAITHFUL",
            Error::NoFaithfulState => "NO_FAITHFUL_STATE",
            Error::InvalidTime(_) => "INVALID_TIME",
            Error::RangeExceeded(_) => "RANGE_EXCEEDED",
            Error::EmptyCombo => "EMPTY_COMBO",
            Error::InvalidTestRate { .. } => "INVALID_TEST_RATE",
            Error::RouteMismatch { .. } => "ROUTE_MISMATCH",
            Error::NonRealNorm(_) => "NON_REAL_NORM",
            Error::NotRealCoefficients => "NOT_REAL_COEFFICIENTS",
            Error::NonCommutingHamiltonian => "NON_COMMUTING_HAMILTONIAN",
            Error::DegenerateDiffusion { .. } => "DEGENERATE_DIFFUSION",
            Error::NotOneDimensional(_) => "NOT_ONE_DIMENSIONAL",
            Error::DimensionTooLarge { .. } => "DIMENSION_TOO_LARGE",
            Error::OutsideEnvelope(_) => "OUTSIDE_ENVELOPE",
            Error::Parse { .. } => "PARSE_ERROR",
            Error::Shape(_) => "SHAPE_ERROR",
            Error::InvalidArgument(_) => "INVALID_ARGUMENT",
        }
    }

    /// Stable integer status; 0 is reserved for success on the C side.
    pub fn status(&self) -> i32 {
        match self {
            Error::DimensionMismatch(_) => 10,
            Error::NonFinite(_) => 11,
            Error::NotHermitian { .. } => 12,
            Error::NotSymmetric { .. } => 13,
            Error::DependentKraus { .. } => 14,
            Error::TooManyKraus { .. } => 15,
            Error::Unstable { .. } => 20,
            Error::SingularLyapunov => 21,
            Error::NotPositiveDefinite { .. } => 22,
            Error::NotFaithful { .. } => 23,
            Error::NoFaithfulState => 24,
            Error::InvalidTime(_) => 30,
            Error::RangeExceeded(_) => 31,
            Error::EmptyCombo => 32,
            Error::InvalidTestRate { .. } => 33,
            Error::RouteMismatch { .. } => 34,
            Error::NonRealNorm(_) => 35,
            Error::NotRealCoefficients => 40,
            Error::NonCommutingHamiltonian => 41,
            Error::DegenerateDiffusion { .. } => 42,
            Error::NotOneDimensional(_) => 43,
            Error::DimensionTooLarge { .. } => 50,
            Error::OutsideEnvelope(_) => 51,
            Error::Parse { .. } => 60,
            Error::Shape(_) => 61,
            Error::InvalidArgument(_) => 62,
        }
    }
}
