use std::io;

use thiserror::Error;

/// Errors produced by the transforms, diagnostics and file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size {0} is not a power of two >= 4")]
    GridSize(usize),

    #[error("grid size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("wavevector must be nonzero")]
    ZeroWavevector,

    #[error("level {level} is not admissible for grid size {n} (max {max:?})")]
    InadmissibleLevel {
        level: u32,
        n: usize,
        max: Option<u32>,
    },

    #[error("invalid wavelet index: {0}")]
    InvalidIndex(String),

    #[error("tail fit needs at least {needed} positive samples in the window, found {found}")]
    TooFewSamples { needed: usize, found: usize },

    #[error("invalid fit window [{0}, {1}]")]
    FitWindow(f64, f64),

    #[error("malformed file: {0}")]
    Format(String),

    #[error("invalid argument: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
