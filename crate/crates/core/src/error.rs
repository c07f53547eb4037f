//! Unified error type for the cadence core crate.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, CadenceError>;

/// All failure modes surfaced by the core pipeline.
#[derive(Debug, Error)]
pub enum CadenceError {
    #[error("recording has fewer than 2 samples")]
    EmptyRecording,

    #[error("non-finite sample at index {0}")]
    NonFiniteSample(usize),

    #[error("unknown dataset layout: {0}")]
    UnknownLayout(String),

    #[error("{file}:{line}: malformed record: {message}")]
    RecordParse {
        file: String,
        line: usize,
        message: String,
    },

    #[error("{file}: expected at least {expected} columns, found {found}")]
    MissingColumns {
        file: String,
        expected: usize,
        found: usize,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: schema mismatch: {message}")]
    SchemaMismatch { path: String, message: String },

    #[error("augmentation parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("window index is empty")]
    EmptyDataset,

    #[error("expected {expected} coincident pairs, got {got}")]
    WrongPairCount { expected: usize, got: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("non-finite activation in {0}")]
    NonFiniteActivation(String),

    #[error("non-finite gradient in {0}")]
    NonFiniteGradient(String),

    #[error("finite-difference epsilon must be positive, got {0}")]
    InvalidEpsilon(f64),

    #[error("training loss diverged to a non-finite value at step {0}")]
    DivergedLoss(u64),

    #[error("{path}: checkpoint version mismatch: {message}")]
    VersionMismatch { path: String, message: String },

    #[error("{path}: checkpoint checksum mismatch")]
    ChecksumMismatch { path: String },

    #[error("class {0:?} has no examples in the training split")]
    MissingClass(String),

    #[error("probe training set contains a single class")]
    SingleClass,

    #[error("non-finite feature value at record {0}")]
    NonFiniteFeature(usize),

    #[error("embedding vector {0} has zero norm")]
    ZeroVector(usize),

    #[error("segment proposal [{start}, {end}) out of block bounds (len {len})")]
    OutOfBounds {
        start: usize,
        end: usize,
        len: usize,
    },

    #[error("invalid config: {0}")]
    InvalidConfig(String),
}

impl CadenceError {
    /// Wrap an io::Error with the path it occurred on.
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CadenceError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
