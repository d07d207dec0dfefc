use thiserror::Error;

/// Errors produced by tree construction, shift semantics, moment tests and
/// the matrix oracle.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An explicit tree description is not a rooted tree.
    #[error("structural error at vertex `{vertex}`: {reason}")]
    Structure { vertex: String, reason: String },

    /// A request reaches beyond the materialized depth.
    #[error("range error: {0}")]
    Range(String),

    /// A scalar argument is outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Tree and weight specifications do not fit together.
    #[error("configuration error: {0}")]
    Config(String),

    /// The operator is not in the class required by the operation.
    #[error("classification error: {0}")]
    Classification(String),

    /// `T*T` is not invertible on the materialized part.
    #[error("operator is not left-invertible: vertex `{vertex}` has norm {norm}")]
    NotLeftInvertible { vertex: String, norm: f64 },

    /// Invariant tuples computed to different depths.
    #[error("comparison error: {0}")]
    Comparison(String),

    #[error("parse error at `{path}`: {message}")]
    Parse { path: String, message: String },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("i/o error on `{path}`: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
