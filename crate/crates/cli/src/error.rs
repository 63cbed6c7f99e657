use ecs_core::EcsError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] EcsError),

    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },

    /// Audit finished but some draws disagreed with the criterion.
    #[error("{disagreements} of {trials} draws disagree with the separability criterion")]
    AuditFailed { disagreements: usize, trials: usize },
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config_error",
            CliError::Core(e) => e.kind(),
            CliError::Io { .. } => "io_error",
            CliError::AuditFailed { .. } => "audit_disagreement",
        }
    }

    /// `error: kind=<kind> msg=<message>` on one line.
    pub fn line(&self) -> String {
        let msg = self.to_string().replace(['\n', '\r'], " ");
        format!("error: kind={} msg={}", self.kind(), msg)
    }
}

pub fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub type CliResult<T> = std::result::Result<T, CliError>;
