use std::fmt;
use std::process::ExitCode;

/// Failure classes with the process exit code each maps to.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            Self::Usage(_) => 1,
            Self::Numerical(_) => 2,
            Self::Io(_) => 3,
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(m) => write!(f, "usage error: {m}"),
            Self::Numerical(m) => write!(f, "numerical error: {m}"),
            Self::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

pub fn usage(msg: impl fmt::Display) -> CliError {
    CliError::Usage(msg.to_string())
}

pub fn numerical(msg: impl fmt::Display) -> CliError {
    CliError::Numerical(msg.to_string())
}

pub fn io(path: &std::path::Path, err: impl fmt::Display) -> CliError {
    CliError::Io(format!("{}: {err}", path.display()))
}
