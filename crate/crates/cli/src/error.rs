use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Module {
        context: String,
        #[source]
        source: modelset::Error,
    },

    #[error("diagnostic failure: {0}")]
    Diagnostic(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn module(context: impl Into<String>, source: modelset::Error) -> Self {
        CliError::Module { context: context.into(), source }
    }

    /// Process exit code: 2 for configuration and input errors, 3 for
    /// numerical failures, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        use modelset::Error as E;
        match self {
            CliError::Config(_) | CliError::Parse { .. } => 2,
            CliError::Io { .. } => 4,
            CliError::Diagnostic(_) => 3,
            CliError::Module { source, .. } => match source {
                E::SingularBasis { .. }
                | E::InjectivityViolation { .. }
                | E::DimensionMismatch(_)
                | E::InvalidWindow(_)
                | E::UnsupportedShape(_)
                | E::EpsilonOutOfRange { .. }
                | E::NotSchemeBacked
                | E::UnsupportedDimension { .. }
                | E::DuplicatePoint(_) => 2,
                _ => 3,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
