use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid user-facing configuration (population size, problem id, dimensions).
    #[error("configuration error: {0}")]
    Config(String),

    /// A caller broke an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// An objective evaluation produced a non-finite value.
    #[error("evaluation error: non-finite value at objective index {index} ({value})")]
    Evaluation { index: usize, value: f64 },

    /// A reference-vector adaptation was asked to work on a fully degenerate range.
    #[error("degenerate objective range: zmax equals zmin in every component")]
    DegenerateRange,

    /// Backpropagation produced a non-finite gradient.
    #[error("training error: non-finite gradient in parameter block `{block}`")]
    Training { block: &'static str },

    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
