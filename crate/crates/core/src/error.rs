use thiserror::Error;

/// Errors produced by the transforms, the tiling and the file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shape mismatch: expected {expected} values, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },

    #[error("root {index} of the order-{order} Laguerre polynomial did not converge")]
    NoConvergence { index: usize, order: usize },

    #[error("admissibility residual {residual:e} at (ell={ell}, p={p}) exceeds {tolerance:e}")]
    Admissibility {
        ell: usize,
        p: usize,
        residual: f64,
        tolerance: f64,
    },

    #[error("negative radicand {0:e} in the hybrid scaling generating function")]
    NegativeRadicand(f64),

    #[error("wavelet family mismatch: {0}")]
    FamilyMismatch(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::ShapeMismatch { expected, actual })
    }
}
