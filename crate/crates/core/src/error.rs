//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:.3e}, tolerance {tol:.3e})")]
    NonHermitian { deviation: f64, tol: f64 },

    #[error("matrix is not unitary (max deviation {deviation:.3e}, tolerance {tol:.3e})")]
    NonUnitary { deviation: f64, tol: f64 },

    #[error("eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("vector is not normalized (norm {norm})")]
    UnnormalizedVector { norm: f64 },

    #[error("bad time grid: {0}")]
    BadGrid(String),

    #[error("curve tracking failed near s = {s} (refinement cap hit; likely a degeneracy)")]
    TrackingFailure { s: f64 },

    #[error("curve does not span the requested interval: {0}")]
    BadSpan(String),

    #[error("gap function is not positive at s = {s} (value {value})")]
    NonpositiveGap { s: f64, value: f64 },

    #[error("running-time search exceeded the step cap {cap}")]
    NotConverged { cap: usize },

    #[error("kick vector must overlap both anholonomy endpoints: {0}")]
    DegenerateChoice(String),

    #[error("gap ordering violated: {0}")]
    GapConditionViolated(String),

    #[error("ground state is degenerate (splitting {splitting:.3e})")]
    DegenerateGround { splitting: f64 },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("crossing of the reference quasienergy not found in (0, 2pi)")]
    CrossingNotFound,

    #[error("crossing s_c = {s_c} too close to a singular point of the gap formula")]
    CrossingAtSingularPoint { s_c: f64 },

    #[error("problem too large: {0}")]
    TooLarge(String),

    #[error("kick period T = {t} too long; need T < {limit} to avoid eigenangle wrap-around")]
    PeriodTooLong { t: f64, limit: f64 },

    #[error("projection onto the requested sector has (near-)zero weight ({weight:.3e})")]
    ZeroProjection { weight: f64 },
}

impl Error {
    /// Stable machine-readable code, used by the CLI error stream.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonHermitian { .. } => "NonHermitian",
            Error::NonUnitary { .. } => "NonUnitary",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::UnnormalizedVector { .. } => "UnnormalizedVector",
            Error::BadGrid(_) => "BadGrid",
            Error::TrackingFailure { .. } => "TrackingFailure",
            Error::BadSpan(_) => "BadSpan",
            Error::NonpositiveGap { .. } => "NonpositiveGap",
            Error::NotConverged { .. } => "NotConverged",
            Error::DegenerateChoice(_) => "DegenerateChoice",
            Error::GapConditionViolated(_) => "GapConditionViolated",
            Error::DegenerateGround { .. } => "DegenerateGround",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::CrossingNotFound => "CrossingNotFound",
            Error::CrossingAtSingularPoint { .. } => "CrossingAtSingularPoint",
            Error::TooLarge(_) => "TooLarge",
            Error::PeriodTooLong { .. } => "PeriodTooLong",
            Error::ZeroProjection { .. } => "ZeroProjection",
        }
    }
}
