use std::io;
use std::path::PathBuf;

use thiserror::Error;
use trapnet_core::bethe::BetheError;
use trapnet_core::dynamics::DynamicsError;
use trapnet_core::pi_lattice::PiSpecError;
use trapnet_core::spectra::SpectraError;
use trapnet_core::GraphError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("{origin}: invalid JSON at line {line}, column {column}: {message}")]
    Json {
        origin: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid graph: {0}")]
    Graph(#[from] GraphError),
    #[error("invalid lattice: {0}")]
    Lattice(#[from] PiSpecError),
    /// The request is well formed but outside where the results are valid.
    #[error("{0}")]
    Domain(String),
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Bethe(#[from] BetheError),
}

impl CliError {
    pub fn json(origin: &str, e: &serde_json::Error) -> Self {
        CliError::Json {
            origin: origin.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }

    /// 2 for bad input, 4 for domain violations, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_)
            | CliError::Read { .. }
            | CliError::Json { .. }
            | CliError::Graph(_)
            | CliError::Lattice(_) => 2,
            CliError::Domain(_) => 4,
            CliError::Write { .. } | CliError::Spectra(_) | CliError::Dynamics(_) | CliError::Bethe(_) => 1,
        }
    }
}
