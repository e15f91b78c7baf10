use thiserror::Error;

/// Errors raised across the crate.
///
/// The CLI maps these onto exit codes, so the variants are grouped by how a
/// caller is expected to react rather than by module.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("value out of range: {0}")]
    Range(String),

    #[error("capacity exceeded: {what} requires {requested}, cap is {cap}")]
    Capacity {
        what: String,
        requested: u128,
        cap: u128,
    },

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("at n = {n}, replicate {replicate}: {source}")]
    AtReplicate {
        n: usize,
        replicate: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn capacity(what: impl Into<String>, requested: u128, cap: u128) -> Self {
        Error::Capacity {
            what: what.into(),
            requested,
            cap,
        }
    }

    /// The innermost error, skipping any replicate coordinates attached on the way up.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtReplicate { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
