use std::path::PathBuf;

/// Error type shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("wav error on {path}: {message}")]
    Wav { path: PathBuf, message: String },

    #[error("audio file {path} has sample rate {found} Hz, expected {expected} Hz (resampling is not performed)")]
    SampleRateMismatch {
        path: PathBuf,
        found: u32,
        expected: u32,
    },

    #[error("audio file {path} has {channels} channels, expected mono")]
    NotMono { path: PathBuf, channels: u16 },

    #[error("waveform too short: {len} samples, need at least {min}")]
    TooShort { len: usize, min: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("manifest parse error at {path}:{line}: {message}")]
    Manifest {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("utterance {utt}: {message}")]
    InvalidSample { utt: String, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("feature cache error on {path}: {message}")]
    Cache { path: PathBuf, message: String },

    #[error("checkpoint error on {path}: {message}")]
    Checkpoint { path: PathBuf, message: String },

    #[error("checkpoint config hash mismatch: checkpoint was written for {expected}, current config hashes to {found}")]
    ConfigHashMismatch { expected: String, found: String },

    #[error("non-finite {component} loss at step {step}")]
    NonFiniteLoss { component: &'static str, step: u64 },

    #[error("shape mismatch in {context}: {message}")]
    Shape {
        context: &'static str,
        message: String,
    },

    #[error(transparent)]
    Tensor(#[from] candle_core::Error),

    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
