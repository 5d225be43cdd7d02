use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::activity::ActivityClass;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid capture schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid scene: {0}")]
    InvalidScene(String),

    #[error("degenerate geometry: scatterer at ({x}, {y}) coincides with the receiver")]
    DegenerateGeometry { x: f64, y: f64 },

    #[error("SNR is undefined for a tensor with zero signal power")]
    UndefinedSnr,

    #[error("tensor shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("unsupported channelization: {n_subcarriers} subcarriers (only 996 is supported)")]
    UnsupportedChannelization { n_subcarriers: usize },

    #[error("unknown resource unit {0}")]
    UnknownRu(String),

    #[error("bandwidth must be positive, got {0} Hz")]
    NonPositiveBandwidth(f64),

    #[error("insufficient data: need at least {needed} snapshots, got {available}")]
    InsufficientData { needed: usize, available: usize },

    #[error("insufficient aperture: angle of arrival needs at least 2 antennas, got {n_antennas}")]
    InsufficientAperture { n_antennas: usize },

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("degenerate dataset: no examples of class {0}")]
    DegenerateDataset(ActivityClass),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("unknown label {0:?}")]
    UnknownLabel(String),

    #[error("unsupported protocol: exactly 4 campaigns per class are required, got {n_campaigns}")]
    UnsupportedProtocol { n_campaigns: usize },

    #[error("bad magic in {path}: expected \"WSLB\", found {found:?}")]
    BadMagic { path: PathBuf, found: [u8; 4] },

    #[error("version mismatch in {path}: expected {expected}, found {found}")]
    VersionMismatch {
        path: PathBuf,
        expected: u16,
        found: u16,
    },

    #[error("truncated payload in {path}: expected {expected} bytes, found {found}")]
    TruncatedPayload {
        path: PathBuf,
        expected: u64,
        found: u64,
    },

    #[error("trailing data in {path}: expected {expected} payload bytes, found {found}")]
    TrailingData {
        path: PathBuf,
        expected: u64,
        found: u64,
    },

    #[error("invalid header field `{field}` in {path}: {reason}")]
    InvalidHeader {
        path: PathBuf,
        field: &'static str,
        reason: String,
    },

    #[error("malformed model file at line {line}: {reason}")]
    ModelFormat { line: usize, reason: String },

    #[error("config parse error: {0}")]
    ConfigParse(#[from] toml::de::Error),

    #[error("config serialization error: {0}")]
    ConfigSerialize(#[from] toml::ser::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by malformed or unreadable input data, as
    /// opposed to invalid configuration or internal failures.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::BadMagic { .. }
                | Error::VersionMismatch { .. }
                | Error::TruncatedPayload { .. }
                | Error::TrailingData { .. }
                | Error::InvalidHeader { .. }
                | Error::ModelFormat { .. }
                | Error::Io { .. }
                | Error::Csv(_)
                | Error::UndefinedSnr
                | Error::InsufficientData { .. }
                | Error::InsufficientAperture { .. }
                | Error::DegenerateDataset(_)
                | Error::UnsupportedProtocol { .. }
                | Error::ShapeMismatch(_)
        )
    }

    /// True for errors in user-supplied configuration or arguments.
    pub fn is_usage_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidConfig(_)
                | Error::ConfigParse(_)
                | Error::UnknownRu(_)
                | Error::UnknownLabel(_)
                | Error::InvalidGrid(_)
                | Error::InvalidSchedule(_)
                | Error::UnsupportedChannelization { .. }
                | Error::NonPositiveBandwidth(_)
                | Error::OutOfRange(_)
        )
    }
}
