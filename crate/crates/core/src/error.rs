use thiserror::Error;

/// Errors raised by the analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of a closed-form expression.
    #[error("domain error: {0}")]
    Domain(String),

    /// The loop gain cannot be mapped onto a stability index.
    #[error("loop gain outside the supported term table: {0}")]
    TableCoverage(String),

    /// A configuration field is missing or inconsistent.
    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    /// The requested analysis does not exist for this converter or scheme.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// No gain crossover inside the search bracket.
    #[error("no crossover in [{lo:.3e}, {hi:.3e}] rad/s")]
    CrossoverOutOfRange { lo: f64, hi: f64 },

    /// The inductor current reached zero: the CCM model no longer applies.
    #[error("discontinuous conduction at t = {t:.6e} s")]
    Dcm { t: f64 },

    /// Newton iteration for the periodic orbit did not converge.
    #[error("periodic orbit not found after {iterations} iterations (residuals: {residuals:?})")]
    OrbitNotConverged {
        iterations: usize,
        residuals: Vec<f64>,
    },

    /// Generic numerical failure (singular matrix, NaN, ...).
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn config(field: &str, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.to_string(),
            message: message.into(),
        }
    }

    /// True for errors caused by the input rather than by the numerics.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config { .. } | Error::Domain(_) | Error::Unsupported(_) | Error::Io(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
