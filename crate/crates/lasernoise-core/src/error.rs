use thiserror::Error;

/// Library error taxonomy. The CLI maps these onto exit codes:
/// validation-class errors -> 2, numerical-class -> 3, statistics -> 4.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {message}")]
    Validation { field: &'static str, message: String },

    #[error("operating point below transparency: n_bar = {n_bar:.6e} < n_t = {n_t:.6e}")]
    BelowTransparency { n_bar: f64, n_t: f64 },

    #[error("drift matrix is not stable (max eigenvalue real part {max_re:.6e})")]
    UnstableDrift { max_re: f64 },

    #[error("numerical failure in {context}: {message}")]
    Numerical { context: &'static str, message: String },

    #[error("unsupported pump configuration: {0}")]
    UnsupportedPump(String),

    #[error("insufficient statistics: {0}")]
    StatisticalPower(String),
}

impl Error {
    pub fn validation(field: &'static str, message: impl Into<String>) -> Self {
        Error::Validation {
            field,
            message: message.into(),
        }
    }

    pub fn numerical(context: &'static str, message: impl Into<String>) -> Self {
        Error::Numerical {
            context,
            message: message.into(),
        }
    }

    /// True for errors caused by bad inputs rather than runtime failures.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Validation { .. } | Error::UnsupportedPump(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
