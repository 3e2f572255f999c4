//! Error type of the command-line layer with the process exit code policy:
//! configuration and usage problems exit with 2, runtime failures (solver
//! aborts, I/O) with 3.

use swe_core::cases::CaseError;
use swe_core::mesh::MeshError;
use swe_core::solver1d::Solver1DError;
use swe_core::solver2d::Solver2DError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid configuration or command line; exits with code 2.
    #[error("{0}")]
    Usage(String),
    /// Solver or output failure at runtime; exits with code 3.
    #[error("{0}")]
    Runtime(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) | CliError::Io(_) => 3,
        }
    }
}

impl From<Solver1DError> for CliError {
    fn from(e: Solver1DError) -> Self {
        match e {
            Solver1DError::InvalidGrid { .. } => CliError::Usage(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<Solver2DError> for CliError {
    fn from(e: Solver2DError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<CaseError> for CliError {
    fn from(e: CaseError) -> Self {
        match e {
            CaseError::UnknownCase { .. }
            | CaseError::InvalidIndex { .. }
            | CaseError::InvalidDimension { .. } => CliError::Usage(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<MeshError> for CliError {
    fn from(e: MeshError) -> Self {
        match e {
            MeshError::Io(io) => CliError::Io(io),
            other => CliError::Usage(other.to_string()),
        }
    }
}
