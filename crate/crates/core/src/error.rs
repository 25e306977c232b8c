use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation (bad length,
    /// non-finite entry, index out of range, unsorted profile).
    #[error("domain error: {0}")]
    Domain(String),

    /// The hypothesis of a lemma or theorem check does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Invalid model or experiment parameters.
    #[error("configuration error: {0}")]
    Config(String),

    /// Unreadable or malformed input data (trace files, config files).
    #[error("input error in {path}: {message}")]
    Input { path: PathBuf, message: String },

    /// The load condition `E[sigma] < servers * E[xi]` does not hold.
    #[error("refusing to estimate: E[sigma] = {mean_sigma} is not below {servers} * E[xi] = {capacity} ({verdict})")]
    Unstable {
        mean_sigma: f64,
        servers: usize,
        capacity: f64,
        verdict: &'static str,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
