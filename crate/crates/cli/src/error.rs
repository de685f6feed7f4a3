use std::process::ExitCode;

use thiserror::Error;

/// Failure of a CLI run, grouped by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numeric(_) => 4,
            CliError::Io { .. } => 1,
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io { path: path.as_ref().display().to_string(), source }
    }
}

impl From<CliError> for ExitCode {
    fn from(e: CliError) -> Self {
        ExitCode::from(e.exit_code())
    }
}

impl From<swim_core::Error> for CliError {
    fn from(e: swim_core::Error) -> Self {
        use swim_core::Error as E;
        let msg = e.to_string();
        match e {
            E::InvalidArgument(_) | E::DimensionMismatch { .. } => CliError::Validation(msg),
            // the library only touches the filesystem to read datasets
            E::Format { .. } | E::DegenerateData(_) | E::Io(_) => CliError::Data(msg),
            E::NonFinite(_) | E::RankDeficient(_) => CliError::Numeric(msg),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
