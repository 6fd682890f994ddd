use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An operation received an argument outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Assignment cannot satisfy the per-cell capacity constraints.
    #[error("infeasible assignment: {users} users but total capacity {capacity} (short by {})", users - capacity)]
    Infeasible { users: usize, capacity: usize },

    /// Exhaustive search would enumerate too many assignments.
    #[error("instance too large for exhaustive search: {combinations} assignments exceeds limit {limit}")]
    OracleTooLarge { combinations: u128, limit: u128 },

    /// Configuration failed to parse or violated an invariant.
    #[error("config error: {0}")]
    Config(String),

    /// I/O failure, annotated with the offending path.
    #[error("io error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
