//! Error type shared by every module in the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node id {id} out of range for graph with {n} nodes")]
    NodeOutOfRange { id: usize, n: usize },

    #[error("edge weight must be positive, got {0}")]
    NonPositiveWeight(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("node {0} has zero degree and sigma = 0; the normalized filter is undefined")]
    DegenerateNode(usize),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("instance with {n} nodes exceeds the {max}-node bound of the exact solver")]
    InstanceTooLarge { n: usize, max: usize },

    #[error("{phase} phase failed: {source}")]
    Phase {
        phase: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Tag an error with the pipeline phase it came from.
    pub fn in_phase(self, phase: &'static str) -> Error {
        Error::Phase {
            phase,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
