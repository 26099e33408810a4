use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CompletionBackend, CompletionRequest, ProviderError, Task};

/// One recorded completion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReplayRecord {
    pub id: String,
    pub task: Task,
    pub term: Option<String>,
    pub completion: String,
}

type Key = (String, Task, Option<String>);

/// Answers completion requests from a recorded file keyed by
/// `(id, task, term)`.
#[derive(Debug, Clone, Default)]
pub struct ReplayBackend {
    entries: HashMap<Key, String>,
}

impl ReplayBackend {
    pub fn from_records(records: impl IntoIterator<Item = ReplayRecord>) -> Result<Self, ProviderError> {
        let mut entries = HashMap::new();
        for r in records {
            let key = (r.id, r.task, r.term);
            if entries.insert(key.clone(), r.completion).is_some() {
                return Err(ProviderError::Validation(format!(
                    "duplicate replay entry for sentence {} ({})",
                    key.0, key.1
                )));
            }
        }
        Ok(ReplayBackend { entries })
    }

    pub fn read<R: BufRead>(input: R, path: &str) -> Result<Self, ProviderError> {
        let mut records = Vec::new();
        for (n, line) in input.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: ReplayRecord = serde_json::from_str(&line).map_err(|e| ProviderError::File {
                path: path.to_string(),
                line: n + 1,
                message: e.to_string(),
            })?;
            records.push(rec);
        }
        Self::from_records(records)
    }

    pub fn load(path: &Path) -> Result<Self, ProviderError> {
        let file = std::fs::File::open(path)?;
        Self::read(std::io::BufReader::new(file), &path.display().to_string())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl CompletionBackend for ReplayBackend {
    fn complete(&self, request: &CompletionRequest) -> Result<String, ProviderError> {
        let key = (
            request.sentence_id.clone(),
            request.task,
            request.term.clone(),
        );
        self.entries
            .get(&key)
            .cloned()
            .ok_or_else(|| ProviderError::ReplayMiss {
                id: request.sentence_id.clone(),
                task: request.task,
                term: request.term.clone(),
            })
    }
}

pub fn write_replay<W: Write>(records: &[ReplayRecord], mut out: W) -> Result<(), ProviderError> {
    for r in records {
        let line = serde_json::to_string(r).map_err(|e| ProviderError::Validation(e.to_string()))?;
        writeln!(out, "{line}")?;
    }
    Ok(())
}
