use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("expected a vector of length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("gaussian width {lambda} not resolvable on this grid (allowed [{min}, {max}])")]
    Unresolvable { lambda: f64, min: f64, max: f64 },

    #[error("band limit violated: {0}")]
    BandLimit(String),

    #[error("cannot normalize the zero vector")]
    ZeroVector,

    #[error("invalid rotation: {0}")]
    InvalidRotation(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("wavevector |k| = {k} exceeds the amplification budget {max}")]
    AmplificationBudget { k: f64, max: f64 },

    #[error("problem size {size} exceeds the limit {limit}: {what}")]
    TooLarge { what: String, size: usize, limit: usize },

    #[error("matrix is not hermitian (deviation {0:e}); inconsistent characteristic function")]
    NotHermitian(f64),

    #[error("path step of {angle} rad exceeds the unambiguous lift limit")]
    AmbiguousLift { angle: f64 },

    #[error("wave packet reaches the box edge (edge mass {0:e})")]
    EdgeContact(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
