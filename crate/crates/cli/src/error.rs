use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] ttnc_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Capacity(String),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 3 for capacity limits, 2 for bad input or usage, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use ttnc_core::Error as E;
        match self {
            CliError::Capacity(_) | CliError::Core(E::Capacity(_)) => 3,
            CliError::Usage(_) | CliError::Io { .. } => 2,
            CliError::Core(
                E::Json(_)
                | E::InvalidShape(_)
                | E::InvalidArgument(_)
                | E::InvalidLegOrder(_)
                | E::UnknownLeg(_)
                | E::DimensionMismatch { .. }
                | E::NotNormalized(_)
                | E::NotIsometric(_)
                | E::NotUnitary(_)
                | E::SizeMismatch { .. },
            ) => 2,
            CliError::Core(_) => 1,
        }
    }
}
