use thiserror::Error;

/// Errors raised by the analysis kernel.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    #[error("config error: {key}: {constraint}")]
    Config { key: String, constraint: String },

    #[error("numeric integrity error in {func}: value {value} outside {expected}")]
    Integrity {
        func: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("out of asymptotic regime in {func}: {detail}")]
    OutOfRegime { func: &'static str, detail: String },
}

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            func,
            detail: detail.into(),
        }
    }

    pub(crate) fn config(key: impl Into<String>, constraint: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            constraint: constraint.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
