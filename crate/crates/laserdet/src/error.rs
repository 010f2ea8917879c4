//! Crate-wide error type.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    // audio
    #[error("file not found: {0}")]
    NotFound(PathBuf),
    #[error("unsupported WAV format: {0}")]
    UnsupportedFormat(String),
    #[error("corrupt WAV header: {0}")]
    CorruptHeader(String),
    #[error("audio contains no samples")]
    EmptyAudio,

    // dwt
    #[error("signal of length {len} too short for a level-{level} decomposition")]
    SignalTooShort { len: usize, level: usize },
    #[error("decomposition level must be at least 1")]
    InvalidLevel,
    #[error("decomposition shapes inconsistent with the given signal length: {0}")]
    InconsistentShapes(String),

    // stats
    #[error("empty input array")]
    EmptyArray,
    #[error("input contains a non-finite value")]
    NonFiniteInput,
    #[error("need at least {need} samples to fit a distribution, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("degenerate data: {0}")]
    DegenerateData(String),

    // features
    #[error("clip too short: {got} samples, need at least {need}")]
    ClipTooShort { need: usize, got: usize },
    #[error("no frames to aggregate")]
    EmptyFrames,

    // svm
    #[error("training data contains a single class")]
    SingleClassData,
    #[error("feature dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite feature value at row {0}")]
    NonFiniteFeature(usize),
    #[error("unsupported model file version: {0}")]
    VersionMismatch(String),
    #[error("corrupt model file: {0}")]
    CorruptModel(String),

    // dataset
    #[error("malformed manifest row {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("duplicate manifest key at row {line}: {key}")]
    DuplicateKey { line: usize, key: String },
    #[error("unknown label at row {line}: {label:?}")]
    UnknownLabel { line: usize, label: String },
    #[error("corpus incomplete for this protocol: {0}")]
    IncompleteCorpus(String),
    #[error("invalid noise band {low}..{high} Hz at sample rate {rate} Hz")]
    InvalidBand { low: f64, high: f64, rate: u32 },

    // cli / configuration
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }
}
