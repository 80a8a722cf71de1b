use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("non-primitive ray {0}")]
    NonPrimitiveRay(usize),
    #[error("non-smooth cone {0}")]
    NonSmoothCone(usize),
    #[error("incomplete fan: {0}")]
    IncompleteFan(String),
    #[error("invalid fan: {0}")]
    InvalidFan(String),
    #[error("unknown preset '{0}'")]
    UnknownPreset(String),
    #[error("arity mismatch: expected {expected} factors, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("not a surface (dimension {0})")]
    NotSurface(usize),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("angle undefined: class on a wall")]
    AngleUndefined,
    #[error("not supercritical: {0}")]
    NotSupercritical(String),
    #[error("heart violation: {0}")]
    HeartViolation(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for failures of a numerical procedure rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_))
    }
}
