//! Scoring of extraction and sentiment output against gold data, plus the
//! cutoff-fraction sweep.

mod asc;
mod ate;
mod sweep;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::AnnotatedSentence;
use crate::hybrid::HybridError;

pub use asc::{evaluate_asc, AscEvalReport, ClassMetrics, PerClass};
pub use ate::{evaluate_ate, AteEvalReport, SentenceCounts};
pub use sweep::{cf_grid, sweep_cf, SweepPoint, SweepRow, SWEEP_CSV_HEADER};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("sentence ids differ: missing from predictions [{}], missing from gold [{}]", .missing_in_predicted.join(", "), .missing_in_gold.join(", "))]
    IdMismatch {
        missing_in_predicted: Vec<String>,
        missing_in_gold: Vec<String>,
    },
    #[error("sentence {id}: prediction for span [{start}, {end}) which is not a gold aspect")]
    UnknownSpan { id: String, start: usize, end: usize },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Hybrid(#[from] HybridError),
}

/// How predicted aspect terms are paired with gold ones.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchMode {
    /// Equal character offsets.
    #[default]
    Span,
    /// Equal lowercased term strings, counted as multisets.
    String,
}

impl MatchMode {
    pub fn as_str(self) -> &'static str {
        match self {
            MatchMode::Span => "span",
            MatchMode::String => "string",
        }
    }
}

impl fmt::Display for MatchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MatchMode {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "span" => Ok(MatchMode::Span),
            "string" => Ok(MatchMode::String),
            other => Err(EvalError::Invalid(format!("unknown match mode {other:?}"))),
        }
    }
}

/// `num / den`, or 0 when `den` is 0.
pub fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Harmonic mean, 0 when both are 0.
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

// Pairs sentences by id in gold order; both sides must hold the same ids.
fn align<'a>(
    predicted: &'a [AnnotatedSentence],
    gold: &'a [AnnotatedSentence],
) -> Result<Vec<(&'a AnnotatedSentence, &'a AnnotatedSentence)>, EvalError> {
    let mut by_id: HashMap<&str, &AnnotatedSentence> = HashMap::new();
    for p in predicted {
        if by_id.insert(p.id(), p).is_some() {
            return Err(EvalError::Invalid(format!("duplicate predicted sentence id {}", p.id())));
        }
    }
    let mut gold_ids = HashSet::new();
    for g in gold {
        if !gold_ids.insert(g.id()) {
            return Err(EvalError::Invalid(format!("duplicate gold sentence id {}", g.id())));
        }
    }
    let missing_in_predicted: Vec<String> = gold
        .iter()
        .filter(|g| !by_id.contains_key(g.id()))
        .map(|g| g.id().to_string())
        .collect();
    let missing_in_gold: Vec<String> = predicted
        .iter()
        .filter(|p| !gold_ids.contains(p.id()))
        .map(|p| p.id().to_string())
        .collect();
    if !missing_in_predicted.is_empty() || !missing_in_gold.is_empty() {
        return Err(EvalError::IdMismatch {
            missing_in_predicted,
            missing_in_gold,
        });
    }
    Ok(gold.iter().map(|g| (by_id[g.id()], g)).collect())
}
