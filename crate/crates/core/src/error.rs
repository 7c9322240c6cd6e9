use thiserror::Error;

/// Errors produced by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(&'static str),

    #[error("matrix is not Hermitian (max |M - M^dag| = {0:e})")]
    NotHermitian(f64),

    #[error("bad dimension {0}: at least 2 is required")]
    BadDimension(usize),

    #[error("bad parameter: {0}")]
    BadParameter(&'static str),

    #[error("Schmidt rank {rank} exceeds the allowed {max}")]
    SchmidtRankTooHigh { rank: usize, max: usize },

    #[error("tensor power dimension {dim} exceeds the cap {cap}")]
    CapExceeded { dim: usize, cap: usize },

    #[error("operator is not a projector (max |P^2 - P| = {0:e})")]
    NotProjector(f64),

    #[error("projector has rank {0}, expected 2")]
    WrongRank(usize),

    #[error("filtering outcome has probability {0:e}")]
    ZeroProbability(f64),

    #[error("not a density matrix: {0}")]
    InvalidState(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
