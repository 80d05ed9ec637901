//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Two arguments that must agree in shape do not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// An operation that needs intensity variation got a constant image.
    #[error("degenerate image: intensity standard deviation is zero")]
    DegenerateImage,

    /// Requested problem size exceeds a configured capacity cap.
    #[error("capacity exceeded: n = {n} is above the configured cap of {cap}")]
    CapacityExceeded { n: usize, cap: usize },

    /// A matrix that must be symmetric is not.
    #[error("matrix is not symmetric: max |S - Sᵀ| = {max_asymmetry:e}")]
    NotSymmetric { max_asymmetry: f64 },

    /// Scalar filter evaluated outside [0, 1].
    #[error("filter argument {x} outside the domain [0, 1]")]
    FilterDomain { x: f64 },

    /// Butterworth-style filters are undefined at cutoff 1.
    #[error("singular cutoff: omega = 1 makes the filter denominator vanish")]
    SingularCutoff,

    /// A function handed to the expansion builder returned a non-finite value.
    #[error("non-finite value {value} at quadrature node {node} (x = {x})")]
    NonFiniteSample { node: usize, x: f64, value: f64 },

    /// Rank outside 1..=n.
    #[error("rank {k} out of range for dimension {n}")]
    RankOutOfRange { k: usize, n: usize },

    /// Every probe vector was annihilated by the filtered operator.
    #[error("degenerate operator: filtered action vanished on all probe vectors")]
    DegenerateOperator,

    /// Malformed input file (image, operator dump, expansion CSV, config).
    #[error("format error in {path}: {reason}")]
    Format { path: String, reason: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("image codec error on {path}: {source}")]
    Codec {
        path: String,
        #[source]
        source: image::ImageError,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }

    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            reason: reason.into(),
        }
    }
}
