use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("residual memory population: {weight:.3e} of the norm sits on levels above the qubit subspace")]
    ResidualMemoryPopulation { weight: f64 },

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("unknown port `{0}`")]
    UnknownPort(String),

    #[error("duplicate mode ({0})")]
    DuplicateMode(String),

    #[error("port `{port}` holds {photons} photons; a polarization CNOT needs at most one")]
    MultiPhotonPort { port: String, photons: usize },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("invalid element: {0}")]
    InvalidElement(String),

    #[error("unknown gate `{0}`")]
    UnknownGate(String),

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("setting set is rank deficient (rank {rank} < {needed})")]
    RankDeficient { rank: usize, needed: usize },

    #[error("maximum-likelihood fit did not converge after {iterations} iterations (gradient norm {gradient_norm:.3e})")]
    NonConvergence { iterations: usize, gradient_norm: f64 },

    #[error("too many failed resamples: {failed} of {total}")]
    ResampleFailures { failed: usize, total: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Short stable tag used in machine-readable error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "dimension mismatch",
            Error::ResidualMemoryPopulation { .. } => "residual memory population",
            Error::NotNormalized(_) => "not normalized",
            Error::UnknownPort(_) => "unknown port",
            Error::DuplicateMode(_) => "duplicate mode",
            Error::MultiPhotonPort { .. } => "multi-photon port",
            Error::Capacity(_) => "capacity exceeded",
            Error::InvalidElement(_) => "invalid element",
            Error::UnknownGate(_) => "unknown gate",
            Error::BasisMismatch(_) => "basis mismatch",
            Error::OutOfRange(_) => "out of range",
            Error::Precondition(_) => "precondition violated",
            Error::RankDeficient { .. } => "rank deficient",
            Error::NonConvergence { .. } => "non-convergence",
            Error::ResampleFailures { .. } => "resample failures",
            Error::Parse(_) => "parse error",
        }
    }
}
