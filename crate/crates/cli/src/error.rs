use std::path::PathBuf;

use greatroot::ErrorKind;
use thiserror::Error;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{}{}: {detail}", path.display(), line.map(|l| format!(":{l}")).unwrap_or_default())]
    Data { path: PathBuf, line: Option<u64>, detail: String },

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Core(#[from] greatroot::Error),
}

impl CliError {
    pub fn data(path: impl Into<PathBuf>, line: Option<u64>, detail: impl Into<String>) -> Self {
        CliError::Data { path: path.into(), line, detail: detail.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data { .. } | CliError::Io { .. } => EXIT_DATA,
            CliError::Core(e) => match e.kind() {
                ErrorKind::Domain => EXIT_USAGE,
                ErrorKind::Data => EXIT_DATA,
                ErrorKind::Numerical => EXIT_NUMERICAL,
            },
        }
    }

    /// Stable identifier printed as `error[<code>]`.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Data { .. } => "data",
            CliError::Io { .. } => "io",
            CliError::Core(e) => e.code(),
        }
    }

    /// Single-line rendering: `error[<code>]: <message>`.
    pub fn render(&self) -> String {
        let msg = self.to_string().split_whitespace().collect::<Vec<_>>().join(" ");
        format!("error[{}]: {msg}", self.code())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
