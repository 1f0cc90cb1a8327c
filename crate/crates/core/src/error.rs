use thiserror::Error;

use crate::env::Site;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("site {site} lies outside the window {window}")]
    OutOfWindow { site: Site, window: String },

    #[error("site {site} is not comparable with {anchor}: {reason}")]
    Domain {
        site: Site,
        anchor: Site,
        reason: &'static str,
    },

    #[error("instance too large for exhaustive enumeration: {steps} steps (limit {limit})")]
    Size { steps: i64, limit: i64 },

    #[error("size guard: {0}")]
    Guard(String),

    #[error("horizon error: {0}")]
    Horizon(String),

    #[error("ordering error: {0}")]
    Ordering(String),

    #[error("provenance error: {0}")]
    Provenance(String),

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
