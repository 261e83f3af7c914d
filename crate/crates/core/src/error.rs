use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced while loading data, training models or tuning.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty input: no samples found")]
    EmptyInput,

    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },

    #[error("line {line}: label `{label}` is not one of -1, 0, +1")]
    InvalidLabel { line: usize, label: String },

    #[error("dataset must contain both classes, found only label {present:+}")]
    SingleClass { present: i8 },

    #[error("missing CSV header row")]
    MissingHeader,

    #[error("unknown label column `{0}`")]
    UnknownLabelColumn(String),

    #[error("row {row}, column {column}: `{value}` is not a finite number")]
    NonNumeric {
        row: usize,
        column: String,
        value: String,
    },

    #[error("sample {index}: non-finite feature value")]
    NonFiniteFeature { index: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid fold count k={k}: {reason}")]
    InvalidFolds { k: usize, reason: String },

    #[error("training split for fold {fold} contains a single class; change k or seed")]
    FoldSingleClass { fold: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("alpha {index} = {value} lies outside [0, {c}]")]
    AlphaOutOfBox { index: usize, value: f64, c: f64 },

    #[error("solver did not converge after {iterations} iterations (C={c}, gamma={gamma})")]
    NonConvergence {
        iterations: usize,
        c: f64,
        gamma: f64,
    },
}

impl Error {
    /// True for failures of the numeric machinery rather than of the input data.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NonConvergence { .. })
    }
}
