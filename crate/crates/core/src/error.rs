use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("coordinate {value} of point {point} (axis {axis}) is outside [0, 1]")]
    CoordinateOutOfRange {
        point: usize,
        axis: usize,
        value: f64,
    },

    #[error("corner coordinate {value} (axis {axis}) is outside [0, 1]")]
    CornerOutOfRange { axis: usize, value: f64 },

    #[error("operation requires a nonempty point set")]
    EmptyPointSet,

    #[error("critical grid has {corners} corners, above the cap of {cap}")]
    GridTooLarge { corners: u128, cap: u64 },

    #[error("number of trials must be positive")]
    ZeroTrials,

    #[error("dimension {0} is too small for the chain construction (need d >= 2)")]
    DimensionTooSmall(usize),

    #[error("epsilon must be positive and finite, got {0}")]
    NonpositiveEpsilon(f64),

    #[error("beta = {beta} is unsound for d = {dim}: (beta/2)(1-1/d)^d = {margin} must exceed 2")]
    UnsoundBeta { beta: f64, dim: usize, margin: f64 },

    #[error("invalid corner: {0}")]
    InvalidCorner(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("internal soundness violation: {0}")]
    SoundnessViolation(String),

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
