use thiserror::Error;

/// Errors raised by model construction, diagonalization and the statistics
/// pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("k*lambda = {0} exceeds the overflow cap of 700")]
    OverflowRisk(f64),

    #[error("kick table tail {tail:e} not below {tol:e} within the grid-size cap")]
    NonConvergedTail { tail: f64, tol: f64 },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("window of {got} sites is below the required {needed}")]
    WindowTooSmall { got: usize, needed: usize },

    #[error("eigensolver failed to converge (index {0:?})")]
    ConvergenceFailure(Option<usize>),

    #[error("eigenvalue {index} has zero modulus")]
    ZeroEigenvalue { index: usize },

    #[error("precondition violated: {0}")]
    PreconditionViolation(String),

    #[error("spectra disagree on parameters: {0}")]
    ParamMismatch(String),

    #[error("empty input")]
    EmptyInput,

    #[error("too few points: got {got}, need at least {needed}")]
    TooFewPoints { got: usize, needed: usize },

    #[error("degenerate spectrum: {multiplicity} coincident points")]
    DegenerateSpectrum { multiplicity: usize },

    #[error("unknown kind `{0}`")]
    UnknownKind(String),

    #[error("<r> never crosses the midpoint {0}")]
    MidpointNotCrossed(f64),

    #[error("corrupt cache entry {0}")]
    CacheCorrupt(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    /// True for failures caused by bad input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParams(_)
                | Error::OverflowRisk(_)
                | Error::NotApplicable(_)
                | Error::WindowTooSmall { .. }
                | Error::PreconditionViolation(_)
                | Error::ParamMismatch(_)
                | Error::UnknownKind(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
