use thiserror::Error;

/// Errors raised anywhere in the compilation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown leg label `{0}`")]
    UnknownLeg(String),
    #[error("dimension mismatch on legs `{a}` ({da}) and `{b}` ({db})")]
    DimensionMismatch {
        a: String,
        b: String,
        da: usize,
        db: usize,
    },
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("invalid leg order: {0}")]
    InvalidLegOrder(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("matrix is not an isometry (deviation {0:.3e})")]
    NotIsometric(f64),
    #[error("gate is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("state is not normalised (norm {0})")]
    NotNormalized(f64),
    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("coupling graph is disconnected")]
    Disconnected,
    #[error("internal error: {0}")]
    Internal(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
