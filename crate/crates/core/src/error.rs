use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{0} is not a prime modulus")]
    NotPrime(u32),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("value {value} out of range for modulus {modulus}")]
    OutOfRange { value: u32, modulus: u32 },
    #[error("inverse of zero")]
    InverseOfZero,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("problem too large for exhaustive enumeration: {0}")]
    TooLarge(String),
    #[error("quadrature did not converge: estimated error {error:e} after {subdivisions} subdivisions")]
    NonConvergence { error: f64, subdivisions: usize },
    #[error("code sampling failed after {0} attempts")]
    SamplingFailed(usize),
    #[error("{0} outside the tabulated range")]
    OutOfTable(f64),
}
