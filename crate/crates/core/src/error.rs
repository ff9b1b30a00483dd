use thiserror::Error;

/// Everything that can go wrong in the solver and its diagnostics.
#[derive(Debug, Error)]
pub enum Error {
    #[error("sample array has {found} entries, grid expects {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("time step {dt} exceeds stability bound {dt_max} at t = {time}")]
    StabilityViolation { dt: f64, dt_max: f64, time: f64 },

    #[error("non-finite coefficient encountered at t = {time}")]
    NonFinite { time: f64 },

    #[error("Gevrey weight overflows at |k| = {k}")]
    Overflow { k: f64 },

    #[error("only {found} populated shells beyond the spectral peak, need {needed}")]
    TooFewShells { found: usize, needed: usize },

    #[error("fit window holds {found} samples, need at least {needed}")]
    TooFewSamples { found: usize, needed: usize },

    #[error("series value {value} at t = {time} is not positive")]
    NonPositiveSample { time: f64, value: f64 },

    #[error("states are at different times ({left} vs {right})")]
    TimeMismatch { left: f64, right: f64 },

    #[error("no snapshot retained at t = {0}")]
    NotSnapshotted(f64),

    #[error("decay exponent {exponent} too small to bound the time-integral tail")]
    InsufficientDecay { exponent: f64 },

    #[error("state is not resolved: top shell carries fraction {fraction:e}")]
    Unresolved { fraction: f64 },

    #[error("malformed snapshot: {0}")]
    Format(String),

    #[error("missing input: {0}")]
    MissingInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
