use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported order {order} (maximum {max})")]
    UnsupportedOrder { order: u32, max: u32 },

    #[error("pole: {0}")]
    Pole(String),

    #[error("series did not converge after {terms} terms")]
    NonConvergence { terms: usize },

    #[error("{0} has no closed-form moment generating function")]
    NoClosedForm(String),

    #[error("quadrature refused: {0}")]
    Dimensionality(String),

    /// A numerical routine finished but could not certify its target accuracy.
    #[error("accuracy target missed: estimate {estimate}, error estimate {error_estimate}")]
    Accuracy { estimate: f64, error_estimate: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable snake-case tag used in machine-readable error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::UnsupportedOrder { .. } => "unsupported_order",
            Error::Pole(_) => "pole",
            Error::NonConvergence { .. } => "non_convergence",
            Error::NoClosedForm(_) => "no_closed_form",
            Error::Dimensionality(_) => "dimensionality",
            Error::Accuracy { .. } => "accuracy",
            Error::Unsupported(_) => "unsupported",
            Error::Input(_) => "input",
            Error::Config(_) => "config",
            Error::Contract(_) => "contract",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}
