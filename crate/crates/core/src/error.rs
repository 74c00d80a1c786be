use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Matrix or vector shapes do not line up.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// An argument fell outside its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A matrix expected to be symmetric is not.
    #[error("matrix is not symmetric (max asymmetry {0})")]
    NotSymmetric(f64),

    /// A matrix expected to be positive semidefinite has a clearly negative eigenvalue.
    #[error("not positive semidefinite (eigenvalue {0})")]
    NotPositiveSemidefinite(f64),

    /// Chain configuration that would retain no samples, or similar.
    #[error("invalid chain configuration: {0}")]
    InvalidChainConfig(String),

    /// Oracle grid would exceed the enforced size cap.
    #[error("grid cap exceeded: {0} cells (cap {1})")]
    GridCapExceeded(u128, u128),

    /// Exact permutation search only supports small label alphabets.
    #[error("exact search bound exceeded: K = {0} > {1}")]
    ExactSearchBound(usize, usize),

    /// Malformed edge-list input.
    #[error("edge list parse error at line {line}: {reason}")]
    EdgeListParse { line: usize, reason: String },

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// (De)serialization failure for configs, results, or checkpoints.
    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
