use std::path::Path;

use thiserror::Error;

use spokeud_core::backend::BackendError;
use spokeud_core::config::ConfigError;
use spokeud_core::flexud::FlexConfigError;
use spokeud_core::metrics::MetricsError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {message}")]
    Input { path: String, message: String },
    #[error("writing {path}: {source}")]
    Output {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("sentence ids differ: only in gold [{}], only in system [{}]", gold_only.join(", "), system_only.join(", "))]
    SentenceIdMismatch {
        gold_only: Vec<String>,
        system_only: Vec<String>,
    },
    #[error("sentence {sentence_id}: {source}")]
    Metrics {
        sentence_id: String,
        #[source]
        source: MetricsError,
    },
    #[error(transparent)]
    Flex(#[from] FlexConfigError),
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error("{failed} of {total} sentences failed")]
    ParseFailures { failed: usize, total: usize, backend: bool },
    #[error("{0} sentences failed validation")]
    Invalid(usize),
}

impl CliError {
    pub fn input(path: &Path, message: impl ToString) -> Self {
        CliError::Input {
            path: path.display().to_string(),
            message: message.to_string(),
        }
    }

    /// 0 success, 1 validation or evaluation failure, 2 usage, 3 backend.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Flex(_) => 2,
            CliError::Backend(_) => 3,
            CliError::ParseFailures { backend: true, .. } => 3,
            _ => 1,
        }
    }
}
