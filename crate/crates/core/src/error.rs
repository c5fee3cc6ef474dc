use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e} after {intervals} intervals")]
    Quadrature { estimate: f64, error: f64, intervals: usize },

    #[error("polaron time not reached within horizon {horizon} ps (|exp(phi)-1| = {residual:e} at horizon)")]
    Horizon { horizon: f64, residual: f64 },

    #[error("integration failed at t = {t} ps: {reason}")]
    Integration { t: f64, reason: String },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("unphysical mode: {0}")]
    Unphysical(String),

    #[error("spectrum: {0}")]
    Spectrum(String),

    #[error("fit: {0}")]
    Fit(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config { path: path.into(), message: message.into() }
    }

    /// Short machine-readable tag for the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Quadrature { .. } => "quadrature",
            Error::Horizon { .. } => "horizon",
            Error::Integration { .. } => "integration",
            Error::InvalidState(_) => "invalid_state",
            Error::Unphysical(_) => "unphysical",
            Error::Spectrum(_) => "spectrum",
            Error::Fit(_) => "fit",
            Error::Config { .. } => "config",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
