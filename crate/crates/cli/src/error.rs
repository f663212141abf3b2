use lglab_core::Error;
use thiserror::Error as ThisError;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, ThisError)]
pub enum CliError {
    /// Bad flags, files or parameters; exit code 1.
    #[error("{0}")]
    Input(String),

    /// A computed result contradicts a theorem the code relies on; exit code 2.
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Input(_) | Self::Io(_) => 1,
            Self::Inconsistent(_) => 2,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match root(&e) {
            Error::NumericalFailure { .. } | Error::NotAnEquilibrium { .. } => {
                Self::Inconsistent(e.to_string())
            }
            Error::PositivityViolation { .. } => Self::Input(format!(
                "{e} (try --scheme log-euler or a smaller --h)"
            )),
            _ => Self::Input(e.to_string()),
        }
    }
}

fn root(e: &Error) -> &Error {
    match e {
        Error::Path { source, .. } => root(source),
        other => other,
    }
}
