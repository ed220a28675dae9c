use std::path::Path;

use thiserror::Error;

/// Failure of a subcommand, carrying the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Unsupported(_) => 3,
            CliError::Numeric(_) => 4,
            CliError::Io(_) => 5,
        }
    }

    pub(crate) fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }
}

impl From<nmqubit::Error> for CliError {
    fn from(err: nmqubit::Error) -> Self {
        use nmqubit::Error as E;
        match err {
            E::InvalidParameter { .. } | E::NegativeTime(_) => CliError::Config(err.to_string()),
            E::Unsupported(msg) => CliError::Unsupported(msg),
            E::Divergence { .. } | E::Quadrature { .. } => CliError::Numeric(err.to_string()),
        }
    }
}
