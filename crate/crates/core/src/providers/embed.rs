use std::collections::{HashMap, HashSet};
use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{collect_results, map_bounded, EmbeddingBackend, ProviderConfig, ProviderError};
use crate::corpus::ParsedSentence;

/// A sentence vector. Serializes as an embedding-cache line
/// `{"id": ..., "vector": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingVector {
    #[serde(rename = "id")]
    pub sentence_id: String,
    #[serde(rename = "vector")]
    pub values: Vec<f64>,
}

/// Sentence vectors keyed by sentence id, optionally backed by a JSONL file.
/// New entries are appended to the file on [`EmbeddingCache::flush`].
#[derive(Debug, Default)]
pub struct EmbeddingCache {
    path: Option<PathBuf>,
    entries: HashMap<String, Vec<f64>>,
    pending: Vec<EmbeddingVector>,
}

impl EmbeddingCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    pub fn from_vectors(vectors: impl IntoIterator<Item = EmbeddingVector>) -> Self {
        EmbeddingCache {
            path: None,
            entries: vectors
                .into_iter()
                .map(|v| (v.sentence_id, v.values))
                .collect(),
            pending: Vec::new(),
        }
    }

    /// Opens a cache file; a missing file is an empty cache that will be
    /// created on the first flush.
    pub fn load(path: &Path) -> Result<Self, ProviderError> {
        let mut cache = EmbeddingCache {
            path: Some(path.to_path_buf()),
            ..Self::default()
        };
        if !path.exists() {
            return Ok(cache);
        }
        let reader = BufReader::new(std::fs::File::open(path)?);
        for (n, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let v: EmbeddingVector = serde_json::from_str(&line).map_err(|e| ProviderError::File {
                path: path.display().to_string(),
                line: n + 1,
                message: e.to_string(),
            })?;
            cache.entries.insert(v.sentence_id, v.values);
        }
        Ok(cache)
    }

    pub fn get(&self, id: &str) -> Option<&[f64]> {
        self.entries.get(id).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn insert(&mut self, id: String, values: Vec<f64>) {
        self.pending.push(EmbeddingVector {
            sentence_id: id.clone(),
            values: values.clone(),
        });
        self.entries.insert(id, values);
    }

    pub fn flush(&mut self) -> Result<(), ProviderError> {
        if self.pending.is_empty() {
            return Ok(());
        }
        if let Some(path) = &self.path {
            let mut file = OpenOptions::new().create(true).append(true).open(path)?;
            for v in &self.pending {
                let line = serde_json::to_string(v).map_err(|e| ProviderError::Validation(e.to_string()))?;
                writeln!(file, "{line}")?;
            }
        }
        self.pending.clear();
        Ok(())
    }
}

fn check_vector(id: &str, values: &[f64], expected: &mut Option<usize>) -> Result<(), ProviderError> {
    if values.is_empty() {
        return Err(ProviderError::Validation(format!("sentence {id}: empty embedding")));
    }
    if values.iter().any(|x| !x.is_finite()) {
        return Err(ProviderError::NonFinite { id: id.to_string() });
    }
    match *expected {
        Some(d) if d != values.len() => Err(ProviderError::Dimension {
            id: id.to_string(),
            expected: d,
            found: values.len(),
        }),
        Some(_) => Ok(()),
        None => {
            *expected = Some(values.len());
            Ok(())
        }
    }
}

/// One vector per sentence, in corpus order. Cached vectors are reused; the
/// rest are requested from `backend` in batches and appended to the cache.
/// With no backend every sentence must already be cached.
pub fn embed(
    corpus: &[ParsedSentence],
    backend: Option<&dyn EmbeddingBackend>,
    cache: &mut EmbeddingCache,
    config: &ProviderConfig,
) -> Result<Vec<EmbeddingVector>, ProviderError> {
    config.validate()?;
    let mut seen = HashSet::new();
    let misses: Vec<&ParsedSentence> = corpus
        .iter()
        .filter(|s| cache.get(&s.id).is_none() && seen.insert(s.id.as_str()))
        .collect();

    let mut fresh: HashMap<String, Vec<f64>> = HashMap::new();
    if !misses.is_empty() {
        let Some(backend) = backend else {
            return Err(ProviderError::CacheMisses(
                misses.iter().map(|s| s.id.clone()).collect(),
            ));
        };
        let batches: Vec<Vec<(&str, &str)>> = misses
            .chunks(config.embed_batch_size)
            .map(|c| c.iter().map(|s| (s.id.as_str(), s.text.as_str())).collect())
            .collect();
        let results = collect_results(map_bounded(&batches, config.max_in_flight, |b| {
            backend.embed_batch(b)
        }))?;
        for (batch, vectors) in batches.iter().zip(results) {
            if vectors.len() != batch.len() {
                return Err(ProviderError::Validation(format!(
                    "embedding backend returned {} vectors for {} sentences starting at {}",
                    vectors.len(),
                    batch.len(),
                    batch[0].0
                )));
            }
            for (&(id, _), v) in batch.iter().zip(vectors) {
                fresh.insert(id.to_string(), v);
            }
        }
    }

    let mut expected = None;
    let mut out = Vec::with_capacity(corpus.len());
    for s in corpus {
        let values = match cache.get(&s.id) {
            Some(v) => v.to_vec(),
            None => fresh[&s.id].clone(),
        };
        check_vector(&s.id, &values, &mut expected)?;
        out.push(EmbeddingVector {
            sentence_id: s.id.clone(),
            values,
        });
    }

    for s in misses {
        if let Some(v) = fresh.remove(&s.id) {
            cache.insert(s.id.clone(), v);
        }
    }
    cache.flush()?;
    Ok(out)
}
