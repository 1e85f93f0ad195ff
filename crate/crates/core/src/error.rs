use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to decode image {path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("mask has no foreground pixels")]
    EmptyForeground,

    #[error("degenerate component: {0} boundary pixels, need at least 8")]
    DegenerateContour(usize),

    #[error("need at least two distinct points")]
    TooFewPoints,

    #[error("foreground too thin for a skeleton (max distance {0:.2} px < 2)")]
    TooThin(f64),

    #[error("no generating points found on the contour")]
    NoGeneratingPoints,

    #[error("cannot keep {requested} critical points out of {available} vertices")]
    TooManyCriticalPoints { requested: usize, available: usize },

    #[error("descriptor pool is empty")]
    EmptyPool,

    #[error("k-means with K = {k} needs at least {k} distinct samples, got {available}")]
    TooFewSamples { k: usize, available: usize },

    #[error("LLC system is singular even with ridge (duplicate codebook entries?)")]
    SingularSystem,

    #[error("cannot pool an empty code list")]
    NoCodes,

    #[error("need at least two classes, each with at least one example")]
    DegenerateLabels,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("not a model file (bad magic bytes)")]
    BadMagic,

    #[error("unsupported model format version {0}")]
    UnsupportedVersion(u16),

    #[error("model file is truncated")]
    Truncated,

    #[error("inconsistent model: {0}")]
    Inconsistent(String),

    #[error("config: {0}")]
    Config(String),

    #[error("dataset: {0}")]
    Dataset(String),

    #[error("report: {0}")]
    Report(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{context}: {source}")]
    Shape {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn in_shape(self, context: impl Into<String>) -> Error {
        Error::Shape {
            context: context.into(),
            source: Box::new(self),
        }
    }
}
