use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole of the Gamma function at {0}")]
    Pole(String),
    #[error("series diverges or failed to converge: {0}")]
    Divergence(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("degenerate deformation: {0}")]
    DegenerateDeformation(String),
    #[error("square-root branch violation: {0}")]
    Branch(String),
    #[error("size guard exceeded: {0}")]
    Guard(String),
    #[error("non-positive deformation weight: {0}")]
    NonPositiveWeight(String),
    #[error("truncation deficit too large: {0}")]
    Truncation(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
