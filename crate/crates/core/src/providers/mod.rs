//! LLM and sentence-encoder access.
//!
//! Prompts are rendered here and sent through a [`CompletionBackend`]; sentence
//! vectors come from an [`EmbeddingBackend`] behind an on-disk cache. Two
//! backend families exist: [`WireClient`] speaks the OpenAI-compatible
//! `/chat/completions` and `/embeddings` endpoints, and [`ReplayBackend`]
//! answers from a recorded JSONL file so runs are reproducible offline.

mod annotate;
mod embed;
mod export;
mod pool;
mod prompt;
mod replay;
mod wire;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use annotate::{
    annotate_asc, annotate_ate, locate_terms, normalize_polarity, parse_term_list, AscOutcome,
    AteOutcome, Reject,
};
pub use embed::{embed, EmbeddingCache, EmbeddingVector};
pub use export::{export_training_pairs, ExportOutcome, TrainingPair};
pub use pool::map_bounded;
pub use prompt::{
    render_asc_prompt, render_asc_text, render_ate_prompt, render_ate_text, AscPrompt, AtePrompt,
    ASC_INSTRUCTION, ATE_INSTRUCTION,
};
pub use replay::{write_replay, ReplayBackend, ReplayRecord};
pub use wire::WireClient;

#[derive(Debug, Error)]
pub enum ProviderError {
    #[error("sentence {id}: request failed after {attempts} attempt(s): {message}")]
    Wire {
        id: String,
        attempts: usize,
        message: String,
    },
    #[error("no replay entry for sentence {id} ({task}{})", .term.as_deref().map(|t| format!(", term {t:?}")).unwrap_or_default())]
    ReplayMiss {
        id: String,
        task: Task,
        term: Option<String>,
    },
    #[error("replay file does not cover sentence ids: {}", .0.join(", "))]
    ReplayMisses(Vec<String>),
    #[error("embedding cache does not cover sentence ids: {}", .0.join(", "))]
    CacheMisses(Vec<String>),
    #[error("{path}: line {line}: {message}")]
    File {
        path: String,
        line: usize,
        message: String,
    },
    #[error("sentence {id}: embedding has dimension {found}, expected {expected}")]
    Dimension {
        id: String,
        expected: usize,
        found: usize,
    },
    #[error("sentence {id}: embedding contains a non-finite component")]
    NonFinite { id: String },
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Ate,
    Asc,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Ate => "ate",
            Task::Asc => "asc",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = ProviderError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ate" => Ok(Task::Ate),
            "asc" => Ok(Task::Asc),
            other => Err(ProviderError::Validation(format!("unknown task {other:?}"))),
        }
    }
}

/// One prompt to send, with the identity the replay backend keys on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompletionRequest {
    pub sentence_id: String,
    pub task: Task,
    pub term: Option<String>,
    pub prompt: String,
}

pub trait CompletionBackend: Sync {
    fn complete(&self, request: &CompletionRequest) -> Result<String, ProviderError>;
}

pub trait EmbeddingBackend: Sync {
    /// Encodes `(sentence_id, text)` pairs, returning one vector per input in
    /// the same order.
    fn embed_batch(&self, batch: &[(&str, &str)]) -> Result<Vec<Vec<f64>>, ProviderError>;
}

pub const DEFAULT_API_KEY_ENV: &str = "ABSA_API_KEY";
pub const DEFAULT_API_BASE_ENV: &str = "ABSA_API_BASE";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderConfig {
    pub endpoint: String,
    pub model: String,
    pub embedding_model: String,
    pub api_key_env: String,
    pub max_in_flight: usize,
    pub timeout_secs: u64,
    pub retries: usize,
    pub backoff_base_ms: u64,
    pub embed_batch_size: usize,
    /// Appended to exported training pairs only.
    pub eos_marker: String,
}

impl Default for ProviderConfig {
    fn default() -> Self {
        ProviderConfig {
            endpoint: "http://localhost:8000/v1".into(),
            model: "flan-t5-base-ate".into(),
            embedding_model: "all-MiniLM-L6-v2".into(),
            api_key_env: DEFAULT_API_KEY_ENV.into(),
            max_in_flight: 4,
            timeout_secs: 60,
            retries: 3,
            backoff_base_ms: 500,
            embed_batch_size: 32,
            eos_marker: "</s>".into(),
        }
    }
}

impl ProviderConfig {
    pub fn validate(&self) -> Result<(), ProviderError> {
        if self.max_in_flight == 0 {
            return Err(ProviderError::Validation(
                "max in-flight requests must be at least 1".into(),
            ));
        }
        if self.embed_batch_size == 0 {
            return Err(ProviderError::Validation(
                "embedding batch size must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn timeout(&self) -> Duration {
        Duration::from_secs(self.timeout_secs)
    }

    /// Delay before retry number `attempt` (0-based): base · 2^attempt.
    pub fn backoff(&self, attempt: usize) -> Duration {
        let factor = 1u64 << attempt.min(16);
        Duration::from_millis(self.backoff_base_ms.saturating_mul(factor))
    }
}

// Replay misses are collected across the whole batch so the error lists
// every uncovered id; any other failure is reported for the first request
// (in input order) that hit it.
pub(crate) fn collect_results<T>(
    results: Vec<Result<T, ProviderError>>,
) -> Result<Vec<T>, ProviderError> {
    let mut misses: Vec<String> = Vec::new();
    let mut first_other = None;
    let mut ok = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(v) => ok.push(v),
            Err(ProviderError::ReplayMiss { id, .. }) => {
                if !misses.contains(&id) {
                    misses.push(id);
                }
            }
            Err(e) => {
                if first_other.is_none() {
                    first_other = Some(e);
                }
            }
        }
    }
    if !misses.is_empty() {
        return Err(ProviderError::ReplayMisses(misses));
    }
    if let Some(e) = first_other {
        return Err(e);
    }
    Ok(ok)
}
