use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh resolution: {0} cells per side (must be >= 1)")]
    InvalidResolution(usize),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("edge {0} is not in the penalized edge set (it lies on the free or contact boundary)")]
    EdgeNotPenalized(usize),
    #[error("degenerate element {0}: zero or negative area")]
    DegenerateElement(usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("levels {coarse} -> {fine} are not nested uniform refinements")]
    NonNested { coarse: usize, fine: usize },
    #[error("power iteration did not converge after {0} iterations")]
    PowerIterationStalled(usize),
    #[error("solver produced a non-finite iterate at iteration {0}")]
    NonFinite(usize),
    #[error("no sign pattern satisfies the optimality system")]
    NoFeasiblePattern,
    #[error("sign-pattern oracle supports at most {max} contact rows, got {got}")]
    OracleTooLarge { max: usize, got: usize },
    #[error("linear solve failed: {0}")]
    Factorization(String),
    #[error("matrix market parse error at line {line}: {msg}")]
    MatrixMarket { line: usize, msg: String },
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
