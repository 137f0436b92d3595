use thiserror::Error;

use crate::linalg::CausalKind;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid signature: {0}")]
    InvalidSignature(String),

    #[error("degenerate inner product: {0}")]
    Degenerate(String),

    #[error("endomorphism is not self-adjoint (residual {residual:.3e})")]
    NotSelfAdjoint { residual: f64 },

    #[error("zero vector has no causal type")]
    ZeroVector,

    #[error("division by a jet with zero value")]
    ZeroJetDivision,

    #[error("the {kind} pseudo-sphere is empty for signature ({p},{q})")]
    EmptyPseudoSphere { kind: CausalKind, p: usize, q: usize },

    #[error("no oriented {kind} 2-planes exist for signature ({p},{q})")]
    NoPlanes { kind: CausalKind, p: usize, q: usize },

    #[error("degenerate plane: {0}")]
    DegeneratePlane(String),

    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(f64),

    #[error("eigenvalue solver did not converge")]
    EigenSolver,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown family: {0}")]
    UnknownFamily(String),

    #[error("invalid tensor: {0}")]
    InvalidTensor(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
