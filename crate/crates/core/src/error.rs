//! Error type shared across the toolkit.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// One or more input invariants were violated. Every violation is
    /// listed, not just the first.
    #[error("invalid input:\n{}", .0.join("\n"))]
    InvalidInput(Vec<String>),

    /// The digraph has no rooted spanning tree (zero eigenvalue of the
    /// Laplacian is not simple).
    #[error("graph is not connected: {0}")]
    Disconnected(String),

    /// Two routes that must agree (combinatorial vs. algebraic test,
    /// transform identities, ...) disagreed beyond tolerance.
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    /// Integration failed: divergence past the configured bound or the
    /// step limit was hit.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// No convergent return-map points; the trajectory is not periodic.
    #[error("no periodic orbit detected: {0}")]
    NotPeriodic(String),

    /// The monodromy spectrum has no multiplier near 1, so the sampled
    /// orbit is not a valid periodic solution.
    #[error("invalid periodic orbit: {0}")]
    InvalidOrbit(String),

    /// Time series passed together were not sampled on the same grid.
    #[error("time grid mismatch: {0}")]
    GridMismatch(String),

    /// Config file could not be parsed.
    #[error("config parse error: {0}")]
    Parse(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(vec![msg.into()])
    }

    /// Exit code bucket used by the command-line front end:
    /// 2 validation, 3 numerical, 4 analysis-inconclusive.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) | Error::Parse(_) | Error::UnknownScenario(_) => 2,
            Error::Numerical(_) | Error::Io(_) | Error::Json(_) => 3,
            Error::NotPeriodic(_) | Error::InvalidOrbit(_) => 4,
            Error::Disconnected(_) | Error::Inconsistent(_) | Error::GridMismatch(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
