use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("label set is empty")]
    EmptyLabelSet,
    #[error("label `{0}` appears in more than one argument set")]
    OverlappingLabels(String),

    #[error("matrix is not symmetric (entry ({row}, {col}) differs by {diff:e})")]
    NotSymmetric { row: usize, col: usize, diff: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid channel: {0}")]
    InvalidChannel(String),
    #[error("invalid genie: {0}")]
    InvalidGenie(String),
    #[error("invalid ordering function: {0}")]
    InvalidOrdering(String),

    /// The requested bound is not defined for this channel (e.g. strong interference).
    #[error("outside the domain of the bound: {0}")]
    Domain(String),
    /// A lemma's hypothesis is not met by the supplied parameters.
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
