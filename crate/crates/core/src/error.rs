use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("degree {degree} outside window [{lo}, {hi}]")]
    DegreeOutOfWindow { degree: i64, lo: i64, hi: i64 },

    #[error("window mismatch: {0}")]
    WindowMismatch(String),

    #[error("not a complex: {0}")]
    NotAComplex(String),

    #[error("invalid presentation: {}", .0.join("; "))]
    InvalidPresentation(Vec<String>),

    #[error("resource cap exceeded: {needed} basis elements requested, cap is {cap}")]
    ResourceCap { needed: usize, cap: usize },

    #[error("unknown zoo entry {0:?}")]
    UnknownZoo(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("structure map {stage} is not surjective in degree {degree}")]
    NonSurjective { stage: usize, degree: i64 },

    #[error("hypothesis fails: {0}")]
    HypothesisFails(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
