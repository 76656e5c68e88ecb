//! Shared error type.

use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

/// Failure modes of the numeric and model layers.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum Error {
    /// An input that must be finite was NaN or infinite.
    #[error("{what} must be finite, got {value}")]
    NonFinite { what: &'static str, value: f64 },

    /// An input fell outside its documented domain.
    #[error("{what} = {value} outside [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// A density was requested at a degenerate correlation (`|rho| = 1`),
    /// where the affinity sum has no Lebesgue density.
    #[error("density undefined at |rho| = 1 (rho = {rho})")]
    DegenerateCorrelation { rho: f64 },

    /// Adaptive quadrature exhausted its subdivision budget before meeting
    /// `abs_tol`. `estimate` is the best value obtained, `error` its bound.
    #[error("quadrature tolerance not met (estimate {estimate}, error bound {error})")]
    Tolerance { estimate: f64, error: f64 },

    /// Fixed-point iteration hit `max_iter`; `last` is the final iterate.
    #[error("fixed-point iteration did not settle within max_iter (last iterate {last})")]
    MaxIterations { last: f64 },

    /// A sample statistic that divides by a variance saw a constant sample.
    #[error("zero variance in sample; correlation undefined")]
    DegenerateVariance,

    /// An operation that needs at least one agent got an empty population.
    #[error("population must contain at least one agent")]
    EmptyPopulation,
}

impl Error {
    /// Best-effort numeric payload: the estimate for tolerance failures and
    /// the last iterate for iteration failures, `None` otherwise.
    pub fn best_estimate(&self) -> Option<f64> {
        match self {
            Error::Tolerance { estimate, .. } => Some(*estimate),
            Error::MaxIterations { last } => Some(*last),
            _ => None,
        }
    }
}
