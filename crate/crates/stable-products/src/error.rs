use thiserror::Error;

/// Failure modes shared by every evaluation routine in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("pole of the gamma function at non-positive integer -{index}")]
    Pole { index: u64 },

    #[error("series does not converge: {0}")]
    NonConvergent(String),

    #[error("parameters lie on the region boundary α₁+α₂=2α₁α₂ ({alpha1}, {alpha2})")]
    BoundaryRegion { alpha1: f64, alpha2: f64 },

    #[error("series requires the {expected} region but parameters are in the {actual} region")]
    WrongRegion {
        expected: &'static str,
        actual: &'static str,
    },

    #[error("the product density at the origin is not supported")]
    Origin,

    #[error("unsupported parameters: {0}")]
    Unsupported(String),

    #[error("quadrature did not converge (achieved error estimate {estimate:e})")]
    Quadrature { estimate: f64 },

    #[error("requested accuracy not reached: {0}")]
    Accuracy(String),

    #[error("i/o failure: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
