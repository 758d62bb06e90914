use thiserror::Error;

/// Errors raised by the lattice, Bethe Ansatz and continuum routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("transfer matrix at t = {point} is singular on the sector (condition number {condition:.3e})")]
    SingularTransferMatrix { point: f64, condition: f64 },

    #[error("log-derivative Hamiltonian is not hermitian (residual {residual:.3e})")]
    ConventionMismatch { residual: f64 },

    #[error("no affine convention reconciles the two Hamiltonians (residual {residual:.3e})")]
    ReconciliationFailure { residual: f64 },

    #[error("sector dimension {dim} exceeds the cap {cap}")]
    DimensionExceeded { dim: usize, cap: usize },

    #[error("iterative eigensolver did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("[H, T^2] residual {residual:.3e} too large for momentum labelling")]
    TranslationNotConserved { residual: f64 },

    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),

    #[error(
        "Bethe equations did not converge after {iterations} iterations (defect {defect:.3e})"
    )]
    BetheNonConvergence { iterations: usize, defect: f64 },

    #[error("Bethe roots collided (gap {gap:.3e})")]
    RootCollision { gap: f64 },

    #[error("Bethe state is not converged")]
    Unconverged,

    #[error("invalid quantum numbers: {0}")]
    InvalidQuantumNumbers(String),

    #[error("quadrature did not reach tolerance (estimated error {error:.3e})")]
    QuadratureNonConvergence { error: f64 },

    #[error("resonant anisotropy: |sin(pi^2 / 2 eta)| = {0:.3e}")]
    Resonance(f64),

    #[error("perturbation is irrelevant: scaling dimension {0} >= 2")]
    IrrelevantOperator(f64),

    #[error("rank-deficient design matrix in fit")]
    RankDeficient,

    #[error("observable {0} is not positive; cannot fit in log space")]
    NonPositiveObservable(f64),

    #[error("too few points for fit: {got} < {need}")]
    TooFewPoints { got: usize, need: usize },

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
