//! Error type shared by all modules.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Matrix dimensions are inconsistent with the operation.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A scalar argument is outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A subsystem or matrix index is out of range.
    #[error("index out of range: {0}")]
    Index(String),

    /// A structurally invalid argument (empty list, bad lengths, ...).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Closed forms exist only for one or two ancilla qubits.
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    /// A matrix failed a density-matrix contract (Hermiticity, trace,
    /// positivity).
    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    /// The Liouvillian null space is (numerically) degenerate.
    #[error("non-unique steady state: {0}")]
    NonUniqueSteadyState(String),

    /// Fixed-step integration lost positivity; a smaller step is needed.
    #[error("stiff integration: {0}; retry with a smaller dt")]
    Stiffness(String),

    /// Finite differencing produced non-finite entries.
    #[error("derivative failure: {0}")]
    DerivativeFailure(String),

    /// An iterative numerical routine failed to converge or produced an
    /// out-of-contract value.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// Bad CLI or file configuration.
    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
