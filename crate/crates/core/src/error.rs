use thiserror::Error;

/// Errors raised when inputs violate a model's preconditions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("amplification with tau = {tau} requires n_n >= {required}, got {n_n}")]
    AmplifierNoise { tau: f64, n_n: f64, required: f64 },

    #[error("probabilities sum to {sum}, expected 1")]
    Unnormalized { sum: f64 },

    #[error("constellation has no symbols")]
    EmptyConstellation,

    #[error("{0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("Fock cutoff {cutoff} is below the required {required}")]
    CutoffTooSmall { cutoff: usize, required: usize },

    #[error("density matrix invalid: {0}")]
    InvalidDensityMatrix(String),

    #[error("limit diverges: {0}")]
    Divergent(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
