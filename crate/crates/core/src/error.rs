use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("mesh is not manifold ({0} defects); pass the override flag to proceed anyway")]
    NonManifold(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("vertices {0} and {1} lie in different connected components")]
    Disconnected(usize, usize),
    #[error("graph is disconnected ({0} components)")]
    DisconnectedGraph(usize),
    #[error("local feature size is undefined: empty medial axis and no injectivity bound")]
    UndefinedFeatureSize,
    #[error("curve too sparse: segment of length {segment} exceeds {limit} (lfs/10)")]
    CurveTooSparse { segment: f64, limit: f64 },
    #[error("sampling targets unsatisfiable: {0}")]
    Unsatisfiable(String),
    #[error("quaternion is not unit length (norm {0})")]
    NonUnitQuaternion(f64),
    #[error("reconstruction failed: {0}")]
    Reconstruction(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Process exit status: 2 for unusable input, 3 when the input is valid
    /// but no reconstruction or sampling could be produced.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Disconnected(..)
            | Error::DisconnectedGraph(_)
            | Error::Unsatisfiable(_)
            | Error::Reconstruction(_) => 3,
            _ => 2,
        }
    }
}
