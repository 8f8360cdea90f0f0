use thiserror::Error;

/// Exit status for success or holding axioms.
pub const EXIT_OK: i32 = 0;
/// Exit status for a semantic failure: an axiom fails or a fit is blocked.
pub const EXIT_FAILURE: i32 = 1;
/// Exit status for usage and input-format errors.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("malformed document: {0}")]
    Format(String),
    #[error("{0}")]
    Usage(String),
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] luce_core::Error),
}

impl CliError {
    pub fn format(message: impl Into<String>) -> Self {
        CliError::Format(message.into())
    }

    pub fn usage(message: impl Into<String>) -> Self {
        CliError::Usage(message.into())
    }

    pub fn exit_code(&self) -> i32 {
        EXIT_USAGE
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Format(_) => "malformed-document",
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
            CliError::Core(luce_core::Error::SizeLimit { .. }) => "size-limit",
            CliError::Core(_) => "invalid-input",
        }
    }
}
