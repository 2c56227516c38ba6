use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("basis is singular (|det| = {det:e})")]
    SingularBasis { det: f64 },

    #[error("physical projection is not injective on the lattice: witness index {witness:?}")]
    InjectivityViolation { witness: Vec<i64> },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("enumeration needs {candidates} candidate indices, budget is {budget}")]
    RegionTooLarge { candidates: u64, budget: u64 },

    #[error("region too small: {0}")]
    RegionTooSmall(String),

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("unsupported window shape: {0}")]
    UnsupportedShape(String),

    #[error("undefined: {0}")]
    Undefined(&'static str),

    #[error("epsilon {eps} outside the valid range (0, {limit})")]
    EpsilonOutOfRange { eps: f64, limit: f64 },

    #[error("translation {0:?} is not in the projected lattice L")]
    NotInL(Vec<f64>),

    #[error("operation needs a scheme-backed point set")]
    NotSchemeBacked,

    #[error("fibers are only enumerated for one-dimensional internal space (got m = {m})")]
    UnsupportedDimension { m: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("stepping-stone chain failed at step {step}: {reason}")]
    ChainFailure { step: usize, reason: String },

    #[error("duplicate point {0:?}")]
    DuplicatePoint(Vec<f64>),
}

pub type Result<T> = std::result::Result<T, Error>;
