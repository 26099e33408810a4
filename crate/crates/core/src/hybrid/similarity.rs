use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::HybridError;
use crate::providers::EmbeddingVector;

/// Divisor used for the standard deviation of the similarity scores.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SigmaMode {
    /// Divide by n.
    #[default]
    Population,
    /// Divide by n - 1; a single score has deviation 0.
    Sample,
}

impl SigmaMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SigmaMode::Population => "population",
            SigmaMode::Sample => "sample",
        }
    }
}

impl fmt::Display for SigmaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SigmaMode {
    type Err = HybridError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "population" => Ok(SigmaMode::Population),
            "sample" => Ok(SigmaMode::Sample),
            other => Err(HybridError::Invalid(format!("unknown sigma mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimilarityStats {
    /// One `(sentence_id, score)` per sentence of Q, in Q order.
    pub similarities: Vec<(String, f64)>,
    pub mu_y: f64,
    pub sigma_y: f64,
    pub cf: f64,
    pub c_x: f64,
}

/// Component-wise mean of the vectors.
pub fn mean_vector(vectors: &[EmbeddingVector]) -> Result<Vec<f64>, HybridError> {
    let Some(first) = vectors.first() else {
        return Err(HybridError::Invalid(
            "mean vector: no sentence received an LLM annotation, so the annotated split is empty"
                .into(),
        ));
    };
    let d = first.values.len();
    let mut sum = vec![0.0; d];
    for v in vectors {
        if v.values.len() != d {
            return Err(HybridError::Invalid(format!(
                "mean vector: sentence {} has dimension {}, expected {d}",
                v.sentence_id,
                v.values.len()
            )));
        }
        for (s, x) in sum.iter_mut().zip(&v.values) {
            *s += x;
        }
    }
    let n = vectors.len() as f64;
    Ok(sum.into_iter().map(|s| s / n).collect())
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `dot(a, b) / (|a| |b|)`. `id` names the sentence behind `a` in errors.
pub fn cosine_similarity(id: &str, a: &[f64], b: &[f64]) -> Result<f64, HybridError> {
    if a.len() != b.len() {
        return Err(HybridError::Invalid(format!(
            "cosine similarity: sentence {id} has dimension {}, mean vector has {}",
            a.len(),
            b.len()
        )));
    }
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 {
        return Err(HybridError::ZeroVector { id: id.to_string() });
    }
    if nb == 0.0 {
        return Err(HybridError::ZeroVector {
            id: "<mean of annotated split>".into(),
        });
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

/// Mean and standard deviation of `scores` (two-pass).
pub fn mean_std(scores: &[f64], mode: SigmaMode) -> (f64, f64) {
    let n = scores.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mu = scores.iter().sum::<f64>() / n as f64;
    let ss: f64 = scores.iter().map(|y| (y - mu) * (y - mu)).sum();
    let divisor = match mode {
        SigmaMode::Population => n,
        SigmaMode::Sample if n > 1 => n - 1,
        SigmaMode::Sample => return (mu, 0.0),
    };
    (mu, (ss / divisor as f64).sqrt())
}

/// `c_x = mu_y + sigma_y * cf` over the scores of Q.
pub fn compute_cutoff(
    similarities: Vec<(String, f64)>,
    cf: f64,
    mode: SigmaMode,
) -> Result<SimilarityStats, HybridError> {
    if similarities.is_empty() {
        return Err(HybridError::Invalid(
            "cutoff: no similarity scores (every sentence is already annotated)".into(),
        ));
    }
    if !cf.is_finite() {
        return Err(HybridError::Invalid(format!("cutoff: cf must be finite, got {cf}")));
    }
    let scores: Vec<f64> = similarities.iter().map(|(_, y)| *y).collect();
    let (mu_y, sigma_y) = mean_std(&scores, mode);
    Ok(SimilarityStats {
        similarities,
        mu_y,
        sigma_y,
        cf,
        c_x: mu_y + sigma_y * cf,
    })
}

/// Splits Q into S (score strictly above `c_x`) and R, keeping Q order.
pub fn select_similar_split(stats: &SimilarityStats) -> (Vec<String>, Vec<String>) {
    let mut s = Vec::new();
    let mut r = Vec::new();
    for (id, score) in &stats.similarities {
        if *score > stats.c_x {
            s.push(id.clone());
        } else {
            r.push(id.clone());
        }
    }
    (s, r)
}
