use thiserror::Error;

use crate::sets::USet;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ImError {
    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unsupported model operation: {0}")]
    Unsupported(String),

    /// Some focal set Θ_x(u) is empty, so the u-space evaluation is not available.
    #[error("empty focal set at x = {x} (witness u = {witness_u}); empty-focal u-set has measure {}", .empty_u.measure())]
    EmptyFocal { x: f64, witness_u: f64, empty_u: USet },

    #[error("assumption violated: {0}")]
    Assumption(String),
}

pub type Result<T> = std::result::Result<T, ImError>;
