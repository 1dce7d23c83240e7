use thiserror::Error;

/// Errors produced by the core library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid envelope: {0}")]
    InvalidEnvelope(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("sample rate mismatch: {left} Hz vs {right} Hz")]
    SampleRateMismatch { left: f64, right: f64 },

    #[error("coefficient array would need {required} elements, above the cap of {cap}")]
    CoefficientCapExceeded { required: usize, cap: usize },

    #[error("solver produced a non-finite iterate at iteration {iteration}")]
    NumericalDivergence { iteration: usize },

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("scan format error: {0}")]
    ScanFormat(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
