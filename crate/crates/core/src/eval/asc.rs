use std::collections::HashMap;

use serde::Serialize;

use super::{align, f1_score, ratio, EvalError};
use crate::corpus::{AnnotatedSentence, Polarity};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PerClass {
    pub positive: ClassMetrics,
    pub negative: ClassMetrics,
    pub neutral: ClassMetrics,
}

impl PerClass {
    pub fn as_array(&self) -> [ClassMetrics; 3] {
        [self.positive, self.negative, self.neutral]
    }
}

/// Sentiment scores over positive, negative and neutral.
///
/// `confusion[g][p]` counts gold class `g` predicted as `p`, classes ordered
/// positive, negative, neutral. Gold aspects without a usable prediction are
/// counted in `absent_predictions[g]` and lower recall only.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AscEvalReport {
    pub per_class: PerClass,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub confusion: [[usize; 3]; 3],
    pub absent_predictions: [usize; 3],
    pub excluded_conflict: usize,
}

impl AscEvalReport {
    pub fn from_confusion(confusion: [[usize; 3]; 3], absent_predictions: [usize; 3], excluded_conflict: usize) -> Self {
        let class = |c: usize| {
            let tp = confusion[c][c];
            let predicted: usize = (0..3).map(|g| confusion[g][c]).sum();
            let gold: usize = confusion[c].iter().sum::<usize>() + absent_predictions[c];
            let precision = ratio(tp, predicted);
            let recall = ratio(tp, gold);
            ClassMetrics {
                precision,
                recall,
                f1: f1_score(precision, recall),
            }
        };
        let per_class = PerClass {
            positive: class(0),
            negative: class(1),
            neutral: class(2),
        };
        let all = per_class.as_array();
        let mean = |f: fn(&ClassMetrics) -> f64| all.iter().map(f).sum::<f64>() / 3.0;
        AscEvalReport {
            per_class,
            macro_precision: mean(|m| m.precision),
            macro_recall: mean(|m| m.recall),
            macro_f1: mean(|m| m.f1),
            confusion,
            absent_predictions,
            excluded_conflict,
        }
    }
}

/// Scores predicted polarities against gold aspects matched by sentence id
/// and span. Gold conflict aspects are excluded; a missing, absent or
/// conflict prediction counts as a miss for the gold class.
pub fn evaluate_asc(predicted: &[AnnotatedSentence], gold: &[AnnotatedSentence]) -> Result<AscEvalReport, EvalError> {
    let mut confusion = [[0usize; 3]; 3];
    let mut absent = [0usize; 3];
    let mut excluded = 0;
    for (p, g) in align(predicted, gold)? {
        let gold_spans: HashMap<(usize, usize), Option<Polarity>> =
            g.annotations.iter().map(|a| (a.span(), a.polarity)).collect();
        let mut pred: HashMap<(usize, usize), Option<Polarity>> = HashMap::new();
        for a in &p.annotations {
            if !gold_spans.contains_key(&a.span()) {
                return Err(EvalError::UnknownSpan {
                    id: p.id().to_string(),
                    start: a.char_start,
                    end: a.char_end,
                });
            }
            if pred.insert(a.span(), a.polarity).is_some() {
                return Err(EvalError::Invalid(format!(
                    "sentence {}: more than one prediction for span [{}, {})",
                    p.id(),
                    a.char_start,
                    a.char_end
                )));
            }
        }
        for a in &g.annotations {
            let gold_class = match a.polarity {
                Some(Polarity::Conflict) => {
                    excluded += 1;
                    continue;
                }
                Some(pol) => pol.class_index().expect("scored polarity"),
                None => {
                    return Err(EvalError::Invalid(format!(
                        "sentence {}: gold aspect {:?} has no polarity",
                        g.id(),
                        a.term
                    )))
                }
            };
            match pred.get(&a.span()).copied().flatten().and_then(Polarity::class_index) {
                Some(p) => confusion[gold_class][p] += 1,
                None => absent[gold_class] += 1,
            }
        }
    }
    Ok(AscEvalReport::from_confusion(confusion, absent, excluded))
}
