//! Error type shared by the whole design pipeline.

use alloc::string::String;
use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("block depth {depth} exceeds the sample count T = {samples}")]
    DepthTooLarge { depth: usize, samples: usize },

    #[error("dataset too short: T = {len}, the rank condition needs T >= (m+1)n + m = {required}")]
    DatasetTooShort { len: usize, required: usize },

    #[error("data matrix has numerical rank {rank} < {required}; see the excitation report")]
    RankDeficient { rank: usize, required: usize },

    #[error("{0} must be symmetric positive semidefinite")]
    NotPsd(&'static str),

    #[error("{0} must be symmetric positive definite")]
    NotPd(&'static str),

    #[error("averaging requires the same input sequence in every run")]
    MismatchedInputs,

    #[error("invalid horizons: {0}")]
    Horizon(String),

    #[error("quadratic term is not positive definite; check R and the conditioning of the data")]
    HessianNotPd,

    #[error("linear program exceeded the pivot budget of {0}")]
    LpPivotLimit(usize),

    #[error("spectral radius {rho} is not < 1: the open-loop Lyapunov design needs a stable map, use the LQR design instead")]
    Unstable { rho: f64 },

    #[error("Riccati iteration did not converge within {0} sweeps")]
    RiccatiDiverged(usize),

    #[error("numerical failure: {0}")]
    Numerics(&'static str),

    #[error("active-set enumeration would visit {total} candidate sets (budget {cap}); shorten the horizons or drop constraints")]
    EnumerationBudget { total: u128, cap: u128 },

    #[error("controller mode mismatch: this operation needs a {expected} controller")]
    ModeMismatch { expected: &'static str },

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),
}
