use std::path::PathBuf;

/// Errors raised by the library.
///
/// The variants are grouped by how a caller is expected to react: a
/// `Domain` error means the arguments violate a precondition, `Hypothesis`
/// means the family fails a nondegeneracy condition, `Refused` marks work
/// outside the configured scale limits, and `Internal` is always a bug.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("bad reduction: parameter {t} at p = {p}")]
    BadReduction { t: i64, p: u64 },

    #[error("computation refused: {0}")]
    Refused(String),

    #[error("cache {}: {msg}", path.display())]
    Cache { path: PathBuf, msg: String },

    #[error("cache {}, line {line}: {msg}", path.display())]
    CacheRow {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
