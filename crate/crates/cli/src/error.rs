use std::path::PathBuf;

use thzqkd_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

pub mod exit {
    pub const FAILURE: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const INFEASIBLE: u8 = 3;
    pub const NONE_ACHIEVABLE: u8 = 4;
    pub const IO: u8 = 5;
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Io { .. } => exit::IO,
            CliError::Core(e) => match e {
                Error::Domain(_)
                | Error::Shape(_)
                | Error::Format { .. }
                | Error::OutOfRange { .. } => exit::USAGE,
                Error::InfeasibleModulation { .. } | Error::DegenerateChannel(_) => {
                    exit::INFEASIBLE
                }
                Error::NoneAchievable(_) => exit::NONE_ACHIEVABLE,
                Error::BracketExceeded(_) | Error::NumericConsistency(_) => exit::FAILURE,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
