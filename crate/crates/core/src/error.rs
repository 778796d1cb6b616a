use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not symmetric: max |a_ij - a_ji| = {deviation:e} exceeds {allowed:e}")]
    Asymmetry { deviation: f64, allowed: f64 },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    Convergence { sweeps: usize, off_norm: f64 },

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("Slater condition not verified: {0}")]
    Slater(String),

    #[error("cone dimension {dim} is below the required minimum of 3")]
    ConeTooSmall { dim: usize },

    #[error("vertex multiplier {index} has a negative inequality entry")]
    VertexInvalid { index: usize },

    #[error("dual problem unbounded: bounding box reached radius {radius:e} with the master still improving")]
    Unbounded { radius: f64 },

    #[error("no multiplier in the search box makes the pencil positive semidefinite (best min eigenvalue {best:e})")]
    EmptySpectrahedron { best: f64 },

    #[error("primal recovery failed: {0}")]
    RecoveryFailed(Box<crate::hqpb::RecoveryFailure>),

    #[error("recovered homogenizing coordinate |z| = {z:e} is too small to map back")]
    DegenerateRecovery { z: f64 },
}

impl Error {
    pub(crate) fn dims(context: &'static str, expected: usize, found: usize) -> Self {
        Error::DimensionMismatch {
            context,
            expected,
            found,
        }
    }
}
