use std::path::PathBuf;

use crate::imaging::Rect;

/// Errors produced by the tracking library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("rect {rect:?} is outside the {width}x{height} frame")]
    OutOfBounds { rect: Rect, width: u32, height: u32 },

    #[error("template placement escapes its sample: {0}")]
    TemplatePlacement(String),

    #[error("target {width}x{height} is too small: {reason}")]
    TargetTooSmall {
        width: u32,
        height: u32,
        reason: String,
    },

    #[error("{0} sample list is empty")]
    EmptySamples(&'static str),

    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),

    #[error("cannot select {k} templates from a bag of {n}")]
    SelectionSize { k: usize, n: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("frame size {got:?} does not match the tracker's {expected:?}")]
    FrameSizeMismatch {
        expected: (u32, u32),
        got: (u32, u32),
    },

    #[error("location history is empty")]
    EmptyHistory,

    #[error("length mismatch: trajectory has {trajectory} boxes, ground truth has {ground_truth}")]
    LengthMismatch {
        trajectory: usize,
        ground_truth: usize,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("sequence not found: {0}")]
    SequenceNotFound(PathBuf),

    #[error("sequence {path}: {message}")]
    Sequence { path: PathBuf, message: String },

    #[error("synthetic motion leaves the canvas at frame {frame}: box {rect:?}")]
    MotionEscapes { frame: usize, rect: Rect },

    #[error("unsupported snapshot version {0}")]
    SnapshotVersion(u32),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("image {path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }
}
