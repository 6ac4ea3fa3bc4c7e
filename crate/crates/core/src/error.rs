use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Every log-likelihood in the batch is `-inf`.
    #[error("no draw has positive likelihood (all {n} log-likelihoods are -inf); the prior and likelihood do not overlap")]
    TotalUnderflow { n: usize },

    #[error("log-likelihood at draw {index} is {value}; expected a real number or -inf")]
    InvalidLogLikelihood { index: usize, value: f64 },

    #[error("function value at draw {index} is NaN")]
    NanValue { index: usize },

    #[error("non-finite parameter coordinate at draw {index}")]
    NonFiniteDraw { index: usize },

    #[error("LAPS would produce {copies} copies ({bytes} bytes), above the cap of {cap} copies")]
    CopyExplosion { copies: u64, bytes: u64, cap: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("worker for shard {shard} panicked: {message}")]
    WorkerPanic { shard: usize, message: String },

    #[error("quadrature did not reach relative tolerance {tolerance:e} (estimate {estimate:e}, error {error:e})")]
    QuadratureNonConvergence {
        tolerance: f64,
        estimate: f64,
        error: f64,
    },

    #[error("malformed sample file: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::TotalUnderflow { .. }
                | Error::InvalidLogLikelihood { .. }
                | Error::NanValue { .. }
                | Error::NonFiniteDraw { .. }
                | Error::CopyExplosion { .. }
                | Error::QuadratureNonConvergence { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
