use std::process::ExitCode;

use cavetic_core::CavityError;

/// Failure of a CLI run, split by exit status.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or physically invalid inputs. Exit 2.
    Usage(String),
    /// The model itself failed. Exit 1.
    Compute(CavityError),
    /// Output could not be written. Exit 1.
    Io(std::io::Error),
}

impl CliError {
    /// A model error raised while checking inputs is a usage error.
    pub fn from_validation(e: CavityError) -> Self {
        Self::Usage(e.to_string())
    }

    pub fn message(&self) -> String {
        match self {
            Self::Usage(m) => m.clone(),
            Self::Compute(e) => e.to_string(),
            Self::Io(e) => e.to_string(),
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            Self::Usage(_) => ExitCode::from(2),
            Self::Compute(_) | Self::Io(_) => ExitCode::from(1),
        }
    }
}

impl From<CavityError> for CliError {
    fn from(e: CavityError) -> Self {
        Self::Compute(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e)
    }
}

pub fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}
