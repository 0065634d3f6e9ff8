use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("time {t} outside [0, {horizon}]")]
    Domain { t: f64, horizon: f64 },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("config error in `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("rate fit failed: {0}")]
    Fit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
