use thiserror::Error;

/// Errors raised by model construction, analysis and simulation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter violated its declared range.
    #[error("invalid parameter: {field} {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    /// Nominal inertia too far from the true one: |J_hat/J - 1| must be < 1.
    #[error("nominal input gain mismatch: g_bar = J_hat/J - 1 = {g_bar}, |g_bar| must be < 1")]
    InputGainMismatch { g_bar: f64 },

    /// State matrix is not Hurwitz. Eigenvalues are given as (re, im) pairs.
    #[error("state matrix is not Hurwitz, eigenvalues {eigenvalues:?}")]
    NotHurwitz { eigenvalues: [(f64, f64); 2] },

    #[error("matrix `{name}` is not symmetric positive-definite")]
    NotPositiveDefinite { name: &'static str },

    #[error("matrix `{name}` is singular")]
    Singular { name: &'static str },

    /// Solved P does not satisfy the block structure required by the
    /// switching surface (P1, P2, P3 > 0 and P2 / P3 = Omega).
    #[error("Lyapunov solution inconsistent with gains: {reason}")]
    InconsistentLyapunovPair { reason: String },

    /// Delayed lookup asked for a sample newer than anything recorded.
    #[error("causality breach: query at t = {query} but newest sample is t = {newest}")]
    Causality { query: f64, newest: f64 },

    #[error("non-finite value in {what} at t = {t}")]
    NonFinite { what: &'static str, t: f64 },

    #[error("series is empty")]
    EmptySeries,

    /// Ultimate bound requested with kappa outside (0, varrho).
    #[error("kappa = {kappa} must lie in (0, varrho = {varrho})")]
    KappaOutOfRange { kappa: f64, varrho: f64 },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    /// True for runtime divergence (as opposed to bad input).
    pub fn is_instability(&self) -> bool {
        matches!(self, Error::NonFinite { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
