use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{op} is undefined at a terminal state")]
    Terminal { op: &'static str },

    #[error("{what} index {index} out of range (limit {limit})")]
    OutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("{what} must be finite")]
    NonFinite { what: &'static str },

    #[error("invalid {what}: {detail}")]
    Invalid { what: &'static str, detail: String },

    #[error("trajectory segment has no steps")]
    EmptySegment,

    #[error("behavior probability of a taken action is zero")]
    ZeroBehaviorProb,

    #[error("agent protocol violation: {0}")]
    Protocol(&'static str),

    #[error("unsupported operation: {0}")]
    Unsupported(&'static str),

    #[error("linear system is singular (policy never terminates under gamma = 1)")]
    Singular,

    #[error("value iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("unknown {kind} name: {name:?}")]
    UnknownName { kind: &'static str, name: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            detail: detail.into(),
        }
    }
}
