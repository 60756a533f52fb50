use std::io;

use thiserror::Error;

/// Errors produced by the heads, training, data and fourier modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch for {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index {index} out of range (valid: 0..{len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("non-finite gradient in parameter tensor `{tensor}`")]
    NonFiniteGradient { tensor: &'static str },

    #[error("empty dataset: {0}")]
    EmptyDataset(&'static str),

    #[error("label {label} at row {row} is out of range for {n_classes} classes")]
    LabelOutOfRange {
        row: usize,
        label: usize,
        n_classes: usize,
    },

    #[error("bad magic: expected \"EMB1\", found {0:?}")]
    BadMagic([u8; 4]),

    #[error("unsupported EMB1 version {0}")]
    UnsupportedVersion(u32),

    #[error("truncated payload: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },

    #[error("malformed file: {0}")]
    Malformed(String),

    #[error("csv line {line}: {message}")]
    Csv { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
