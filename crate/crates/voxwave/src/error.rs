//! Command-level errors and their exit codes.
//!
//! 0 success, 2 usage (flag parsing and flag-value validation, mostly via
//! clap), 3 unreadable or malformed data files, 4 a structurally valid
//! request the pipeline math rejects (length, depth, divisibility and
//! similar preconditions).

use std::fmt;
use std::io;
use std::path::PathBuf;

#[derive(Debug)]
pub enum CliError {
    /// Flag values that parse but make no sense together.
    Usage {
        detail: String,
    },
    Io {
        path: PathBuf,
        source: io::Error,
    },
    /// File exists and reads, but its contents are not the format.
    Format {
        path: PathBuf,
        detail: String,
    },
    /// Config file problems (syntax, unknown keys, bad values).
    Config {
        detail: String,
    },
    /// Precondition violation from the numeric pipeline.
    Pipeline(voxwave_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage { .. } => 2,
            CliError::Io { .. } | CliError::Format { .. } | CliError::Config { .. } => 3,
            CliError::Pipeline(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage { detail } => write!(f, "{}", detail),
            CliError::Io { path, source } => write!(f, "{}: {}", path.display(), source),
            CliError::Format { path, detail } => write!(f, "{}: {}", path.display(), detail),
            CliError::Config { detail } => write!(f, "config: {}", detail),
            CliError::Pipeline(e) => write!(f, "{}", e),
        }
    }
}

impl std::error::Error for CliError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            CliError::Io { source, .. } => Some(source),
            CliError::Pipeline(e) => Some(e),
            _ => None,
        }
    }
}

impl From<voxwave_core::Error> for CliError {
    fn from(e: voxwave_core::Error) -> Self {
        CliError::Pipeline(e)
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
