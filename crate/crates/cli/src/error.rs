use std::path::PathBuf;

use shortop::Error as Core;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Core),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

impl CliError {
    /// 2 for a mathematical precondition, 3 for malformed input or I/O,
    /// 1 when the library's own cross-checks fail.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) => match e {
                Core::NotSymmetric { .. }
                | Core::NotPsd { .. }
                | Core::NotComplementary { .. }
                | Core::NotCompatible
                | Core::PreconditionViolated { .. }
                | Core::RangeNotContained
                | Core::BlockNotPsd => 2,
                Core::DimensionMismatch { .. }
                | Core::InvalidTolerance { .. }
                | Core::NonFinite { .. }
                | Core::UnknownSuite(_) => 3,
                Core::NumericalKernel(_) | Core::Disagreement { .. } | Core::Postcondition { .. } => 1,
            },
            CliError::Io { .. } | CliError::Parse { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
