use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("accuracy cannot be guaranteed: {0}")]
    Accuracy(String),

    #[error("pole of the gamma function at z = {0}")]
    Pole(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported region: {0}")]
    UnsupportedRegion(String),

    #[error("off resonance: {0}")]
    OffResonance(String),

    #[error("integration failed at tau = {tau}: {reason}")]
    IntegrationFailure { tau: f64, reason: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unsupported configuration: {0}")]
    UnsupportedConfig(String),

    #[error("config parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Errors caused by bad user input, as opposed to numerical breakdown.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidConfig(_)
                | Error::UnsupportedConfig(_)
                | Error::Parse { .. }
                | Error::Domain(_)
                | Error::OffResonance(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
