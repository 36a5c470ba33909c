use thiserror::Error;

use crate::algebra::AlgebraDescriptor;

/// Failures raised by the algebra, series and flow layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("descriptor mismatch: {left} vs {right}")]
    ShapeMismatch {
        left: AlgebraDescriptor,
        right: AlgebraDescriptor,
    },
    #[error("truncation order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("capability missing: {0}")]
    CapabilityMissing(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn shape(left: &AlgebraDescriptor, right: &AlgebraDescriptor) -> Self {
        Error::ShapeMismatch {
            left: left.clone(),
            right: right.clone(),
        }
    }
}
