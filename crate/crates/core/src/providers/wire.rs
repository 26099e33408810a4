use std::thread;

use serde::Deserialize;
use serde_json::json;

use super::{
    CompletionBackend, CompletionRequest, EmbeddingBackend, ProviderConfig, ProviderError,
};

/// Blocking client for OpenAI-compatible chat-completion and embedding
/// endpoints. Requests use temperature 0 and are retried with exponential
/// backoff on transport errors, 429 and 5xx responses.
pub struct WireClient {
    client: reqwest::blocking::Client,
    base_url: String,
    api_key: Option<String>,
    config: ProviderConfig,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatMessage,
}

#[derive(Deserialize)]
struct ChatMessage {
    #[serde(default)]
    content: Option<String>,
}

#[derive(Deserialize)]
struct EmbeddingResponse {
    data: Vec<EmbeddingDatum>,
}

#[derive(Deserialize)]
struct EmbeddingDatum {
    #[serde(default)]
    index: Option<usize>,
    embedding: Vec<f64>,
}

enum Attempt {
    Retry(String),
    Fatal(String),
}

impl WireClient {
    /// The API key is read from the environment variable named in
    /// `config.api_key_env`; requests go unauthenticated when it is unset.
    pub fn new(config: ProviderConfig) -> Result<Self, ProviderError> {
        config.validate()?;
        let client = reqwest::blocking::Client::builder()
            .timeout(config.timeout())
            .build()
            .map_err(|e| ProviderError::Validation(format!("http client: {e}")))?;
        let api_key = std::env::var(&config.api_key_env).ok().filter(|k| !k.is_empty());
        Ok(WireClient {
            client,
            base_url: config.endpoint.trim_end_matches('/').to_string(),
            api_key,
            config,
        })
    }

    fn post_once(&self, path: &str, body: &serde_json::Value) -> Result<String, Attempt> {
        let mut req = self
            .client
            .post(format!("{}{path}", self.base_url))
            .json(body);
        if let Some(key) = &self.api_key {
            req = req.bearer_auth(key);
        }
        let resp = req.send().map_err(|e| Attempt::Retry(e.to_string()))?;
        let status = resp.status();
        let text = resp.text().map_err(|e| Attempt::Retry(e.to_string()))?;
        if status.is_success() {
            Ok(text)
        } else if status.as_u16() == 429 || status.is_server_error() {
            Err(Attempt::Retry(format!("HTTP {status}: {text}")))
        } else {
            Err(Attempt::Fatal(format!("HTTP {status}: {text}")))
        }
    }

    fn post_with_retries(
        &self,
        id: &str,
        path: &str,
        body: &serde_json::Value,
    ) -> Result<String, ProviderError> {
        let mut attempts = 0;
        loop {
            attempts += 1;
            match self.post_once(path, body) {
                Ok(text) => return Ok(text),
                Err(Attempt::Retry(_)) if attempts <= self.config.retries => {
                    thread::sleep(self.config.backoff(attempts - 1));
                }
                Err(Attempt::Retry(message)) | Err(Attempt::Fatal(message)) => {
                    return Err(ProviderError::Wire {
                        id: id.to_string(),
                        attempts,
                        message,
                    })
                }
            }
        }
    }
}

impl CompletionBackend for WireClient {
    fn complete(&self, request: &CompletionRequest) -> Result<String, ProviderError> {
        let body = json!({
            "model": self.config.model,
            "messages": [{"role": "user", "content": request.prompt}],
            "temperature": 0,
        });
        let text = self.post_with_retries(&request.sentence_id, "/chat/completions", &body)?;
        let parsed: ChatResponse = serde_json::from_str(&text).map_err(|e| ProviderError::Wire {
            id: request.sentence_id.clone(),
            attempts: 1,
            message: format!("malformed chat response: {e}"),
        })?;
        parsed
            .choices
            .into_iter()
            .next()
            .map(|c| c.message.content.unwrap_or_default())
            .ok_or_else(|| ProviderError::Wire {
                id: request.sentence_id.clone(),
                attempts: 1,
                message: "chat response has no choices".into(),
            })
    }
}

impl EmbeddingBackend for WireClient {
    fn embed_batch(&self, batch: &[(&str, &str)]) -> Result<Vec<Vec<f64>>, ProviderError> {
        let Some(&(first_id, _)) = batch.first() else {
            return Ok(Vec::new());
        };
        let ids = batch.iter().map(|(id, _)| *id).collect::<Vec<_>>().join(",");
        let body = json!({
            "model": self.config.embedding_model,
            "input": batch.iter().map(|(_, text)| *text).collect::<Vec<_>>(),
        });
        let text = self.post_with_retries(&ids, "/embeddings", &body)?;
        let malformed = |message: String| ProviderError::Wire {
            id: first_id.to_string(),
            attempts: 1,
            message,
        };
        let mut parsed: EmbeddingResponse = serde_json::from_str(&text)
            .map_err(|e| malformed(format!("malformed embedding response: {e}")))?;
        if parsed.data.len() != batch.len() {
            return Err(malformed(format!(
                "embedding response has {} vectors for {} inputs",
                parsed.data.len(),
                batch.len()
            )));
        }
        if parsed.data.iter().all(|d| d.index.is_some()) {
            parsed.data.sort_by_key(|d| d.index);
        }
        Ok(parsed.data.into_iter().map(|d| d.embedding).collect())
    }
}
