use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("state is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("eigendecomposition of Jx did not converge (dimension {dim})")]
    Eigendecomposition { dim: usize },

    #[error("norm drift {deviation:e} of member {member} at kick {kick} exceeds tolerance {tolerance:e}")]
    NormDrift { kick: usize, member: usize, deviation: f64, tolerance: f64 },

    #[error("negative variance {variance:e}")]
    NegativeVariance { variance: f64 },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("time series too short: need kicks up to {needed}, have up to {available}")]
    SeriesTooShort { needed: usize, available: usize },

    #[error("non-positive value {value} at kick {kick} inside fit window")]
    NonPositiveInWindow { kick: usize, value: f64 },

    #[error("at grid point (theta={theta}, phi={phi}): {source}")]
    GridPoint {
        theta: f64,
        phi: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    pub(crate) fn at_grid_point(self, theta: f64, phi: f64) -> Self {
        Error::GridPoint { theta, phi, source: Box::new(self) }
    }
}
