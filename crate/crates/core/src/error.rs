use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the descriptor, learning and pipeline stack.
#[derive(Debug, Error)]
pub enum ShapeError {
    #[error("invalid image: {0}")]
    InvalidImage(String),
    #[error("histogram has a single populated bin; no separating threshold exists")]
    DegenerateHistogram,
    #[error("invalid scale {0}: must be positive and finite")]
    InvalidScale(f64),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("too few corners: found {found}, need at least {needed}")]
    TooFewCorners { found: usize, needed: usize },
    #[error("all corners coincide with their centroid")]
    DegenerateCorners,
    #[error("mask has no foreground pixels")]
    EmptyMask,
    #[error("contour is degenerate ({0} points)")]
    DegenerateContour(usize),
    #[error("gradient signature is empty")]
    EmptySignature,
    #[error("reference Fourier coefficient is zero")]
    ZeroReference,
    #[error("DC Fourier coefficient is zero")]
    ZeroDc,
    #[error("image contains no shape")]
    EmptyShape,
    #[error("descriptor kind mismatch: expected {expected}, got {got}")]
    KindMismatch { expected: String, got: String },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("training data contains a single class")]
    SingleClass,
    #[error("no data")]
    EmptyData,
    #[error("directory {0} contains no usable images")]
    EmptyDirectory(PathBuf),
    #[error("class {class} has {count} entries, too few to split")]
    ClassTooSmall { class: String, count: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("image decode error for {path}: {source}")]
    Decode {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = ShapeError> = std::result::Result<T, E>;
