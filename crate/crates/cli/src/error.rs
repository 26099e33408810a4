use absa_core::corpus::CorpusError;
use absa_core::deprules::DeprulesError;
use absa_core::eval::EvalError;
use absa_core::hybrid::HybridError;
use absa_core::providers::ProviderError;
use thiserror::Error;

/// Command failure, split by exit code: bad input data or configuration
/// exits 2, file system and network failures exit 3.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        CliError::Validation(message.into())
    }

    pub(crate) fn context(self, what: &str) -> Self {
        match self {
            CliError::Validation(m) => CliError::Validation(format!("{what}: {m}")),
            CliError::Io(m) => CliError::Io(format!("{what}: {m}")),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::Io(_) => CliError::Io(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<DeprulesError> for CliError {
    fn from(e: DeprulesError) -> Self {
        match e {
            DeprulesError::Io { .. } => CliError::Io(e.to_string()),
            DeprulesError::Config { .. } => CliError::Validation(e.to_string()),
        }
    }
}

fn provider_is_io(e: &ProviderError) -> bool {
    matches!(e, ProviderError::Io(_) | ProviderError::Wire { .. })
}

impl From<ProviderError> for CliError {
    fn from(e: ProviderError) -> Self {
        if provider_is_io(&e) {
            CliError::Io(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

impl From<HybridError> for CliError {
    fn from(e: HybridError) -> Self {
        match &e {
            HybridError::Provider { source, .. } if provider_is_io(source) => CliError::Io(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Hybrid(h) => h.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            CliError::Io(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}
