use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical layers.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the operation's mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature hit its subdivision limit; carries the best estimate.
    #[error(
        "quadrature did not converge: best estimate {value} with error estimate {error_estimate:e} \
         after {evaluations} evaluations"
    )]
    NoConvergence {
        value: Complex64,
        error_estimate: f64,
        evaluations: usize,
    },

    /// A run configuration that cannot produce a faithful result (grid too small, bad ranges).
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn config<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}
