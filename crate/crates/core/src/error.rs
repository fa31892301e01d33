use std::io;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic { expected: [u8; 4], found: [u8; 4] },

    #[error("unsupported format version {0}")]
    UnsupportedVersion(u32),

    #[error("malformed file: {0}")]
    Format(String),

    #[error("truncated input: {0}")]
    Truncated(String),

    #[error("payload size mismatch: header implies {expected} bytes, found {found}")]
    SizeMismatch { expected: u64, found: u64 },

    #[error("sample {value} at index {index} exceeds the {bit_depth}-bit range")]
    SampleOutOfRange {
        index: usize,
        value: i64,
        bit_depth: u32,
    },

    #[error("invalid dimensions: {0}")]
    InvalidDims(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("axis extent {extent} is odd; the decomposition needs frame pairs")]
    OddExtent { extent: usize },

    #[error("compensated band pair has no side information")]
    MissingSideInfo,

    #[error("side information does not match the bands: {0}")]
    SideInfoMismatch(String),

    #[error("row {row} of the weighted matrix is empty")]
    EmptyRow { row: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors that stem from reading or decoding external data.
    pub fn is_io_or_format(&self) -> bool {
        matches!(
            self,
            Error::Io(_)
                | Error::BadMagic { .. }
                | Error::UnsupportedVersion(_)
                | Error::Format(_)
                | Error::Truncated(_)
                | Error::SizeMismatch { .. }
                | Error::SampleOutOfRange { .. }
                | Error::SideInfoMismatch(_)
                | Error::DimensionMismatch(_)
                | Error::MissingSideInfo
        )
    }
}
