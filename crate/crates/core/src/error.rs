use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("dimension mismatch: expected {expected:?}, got {actual:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },

    #[error("invalid value: {0}")]
    Value(String),

    #[error("non-finite entry at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("index {index} out of range {lo}..={hi}")]
    OutOfRange { index: i64, lo: i64, hi: i64 },

    #[error("csv parse error at line {line}, column {column}: {message}")]
    Csv {
        line: u64,
        column: usize,
        message: String,
    },

    #[error("pgm decode error: {0}")]
    Pgm(#[from] PgmError),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    InFile {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error("frame directory: {0}")]
    FrameDir(String),

    #[error("serialization error: {0}")]
    Serialize(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn in_file(path: impl Into<PathBuf>, source: Error) -> Self {
        Error::InFile {
            path: path.into(),
            source: Box::new(source),
        }
    }

    /// True when the error (or the error it wraps) came from the filesystem.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io { .. } => true,
            Error::InFile { source, .. } => source.is_io(),
            _ => false,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PgmError {
    #[error("bad magic number, expected P2 or P5")]
    BadMagic,
    #[error("unexpected end of header")]
    TruncatedHeader,
    #[error("malformed header field `{0}`")]
    BadHeaderField(String),
    #[error("image dimensions must be positive, got {width}x{height}")]
    ZeroDimension { width: usize, height: usize },
    #[error("maxval {0} out of range 1..=65535")]
    MaxvalOutOfRange(u64),
    #[error("payload too short: expected {expected} bytes, found {actual}")]
    PayloadLength { expected: usize, actual: usize },
    #[error("expected {expected} samples, found {actual}")]
    SampleCount { expected: usize, actual: usize },
    #[error("sample {value} exceeds maxval {maxval}")]
    SampleAboveMaxval { value: u64, maxval: u64 },
    #[error("malformed sample `{0}`")]
    BadSample(String),
}
