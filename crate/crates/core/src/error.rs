use thiserror::Error;

/// Errors raised by the estimators, the simulator and the I/O layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("ZeroVarianceSeries: row {0} is constant")]
    ZeroVarianceSeries(usize),

    #[error("InvalidComponentCount: p = {p} must lie in 1..={max}")]
    InvalidComponentCount { p: usize, max: usize },

    #[error("DimensionMismatch: {0}")]
    DimensionMismatch(String),

    #[error("NonFiniteInput: {0}")]
    NonFiniteInput(String),

    #[error("TooFewSamples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("ZeroResidualVariance: residual variance of target {0} vanished")]
    ZeroResidualVariance(usize),

    #[error("UnderdeterminedSystem: N = {n}, m = {m}, T = {t} leaves fewer observations than parameters")]
    UnderdeterminedSystem { n: usize, m: usize, t: usize },

    #[error("DegenerateDistances: all k-NN distances vanish")]
    DegenerateDistances,

    #[error("StabilityNotReached after {0} attempts")]
    StabilityNotReached(usize),

    #[error("NumericalBlowup: |x| exceeded {0:e}")]
    NumericalBlowup(f64),

    #[error("InvalidParams: {0}")]
    InvalidParams(String),

    #[error("IncompatibleSamplingRates: tr = {tr} is not an integer multiple of dt = {dt}")]
    IncompatibleSamplingRates { dt: f64, tr: f64 },

    #[error("ZeroPowerSignal: row {0} carries no power")]
    ZeroPowerSignal(usize),

    #[error("DegenerateGroundTruth: need at least one edge and one non-edge")]
    DegenerateGroundTruth,

    #[error("AllDifferencesZero")]
    AllDifferencesZero,

    #[error("EmptyInput")]
    EmptyInput,

    #[error("ParseError at line {line}, column {column}: {message}")]
    ParseError {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("NonFiniteValue at line {line}, column {column}")]
    NonFiniteValue { line: usize, column: usize },

    #[error("RaggedRows: line {line} has {got} fields, expected {expected}")]
    RaggedRows {
        line: usize,
        expected: usize,
        got: usize,
    },

    #[error("InvalidConfig: {0}")]
    InvalidConfig(String),

    #[error("IoError: {0}")]
    Io(#[from] std::io::Error),

    #[error("JsonError: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerical estimators themselves, as opposed
    /// to configuration or I/O problems.
    pub fn is_estimator_error(&self) -> bool {
        !matches!(
            self,
            Error::ParseError { .. }
                | Error::NonFiniteValue { .. }
                | Error::RaggedRows { .. }
                | Error::InvalidConfig(_)
                | Error::Io(_)
                | Error::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
