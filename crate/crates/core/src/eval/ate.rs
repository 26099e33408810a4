use std::collections::HashMap;
use std::hash::Hash;

use serde::Serialize;

use super::{align, f1_score, ratio, EvalError, MatchMode};
use crate::corpus::AnnotatedSentence;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SentenceCounts {
    pub id: String,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AteEvalReport {
    pub match_mode: MatchMode,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub per_sentence: Vec<SentenceCounts>,
}

impl AteEvalReport {
    pub fn from_counts(match_mode: MatchMode, tp: usize, fp: usize, fn_: usize) -> Self {
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        AteEvalReport {
            match_mode,
            tp,
            fp,
            fn_,
            precision,
            recall,
            f1: f1_score(precision, recall),
            per_sentence: Vec::new(),
        }
    }
}

// Matches are key equalities, so pairing each key min(pred, gold) times is
// both greedy and maximal.
fn count_matches<K: Eq + Hash>(pred: Vec<K>, gold: Vec<K>) -> (usize, usize, usize) {
    let mut remaining: HashMap<K, usize> = HashMap::new();
    let n_gold = gold.len();
    for k in gold {
        *remaining.entry(k).or_default() += 1;
    }
    let n_pred = pred.len();
    let mut tp = 0;
    for k in pred {
        if let Some(c) = remaining.get_mut(&k) {
            if *c > 0 {
                *c -= 1;
                tp += 1;
            }
        }
    }
    (tp, n_pred - tp, n_gold - tp)
}

/// Scores predicted aspect terms against gold, sentence by sentence, and
/// accumulates the counts over the corpus. Every annotation counts
/// regardless of source or polarity.
pub fn evaluate_ate(
    predicted: &[AnnotatedSentence],
    gold: &[AnnotatedSentence],
    mode: MatchMode,
) -> Result<AteEvalReport, EvalError> {
    let pairs = align(predicted, gold)?;
    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    let mut per_sentence = Vec::with_capacity(pairs.len());
    for (p, g) in pairs {
        let (t, f, n) = match mode {
            MatchMode::Span => count_matches(
                p.annotations.iter().map(|a| a.span()).collect(),
                g.annotations.iter().map(|a| a.span()).collect(),
            ),
            MatchMode::String => count_matches(
                p.annotations.iter().map(|a| a.term.to_lowercase()).collect(),
                g.annotations.iter().map(|a| a.term.to_lowercase()).collect(),
            ),
        };
        tp += t;
        fp += f;
        fn_ += n;
        per_sentence.push(SentenceCounts {
            id: g.id().to_string(),
            tp: t,
            fp: f,
            fn_: n,
        });
    }
    let mut report = AteEvalReport::from_counts(mode, tp, fp, fn_);
    report.per_sentence = per_sentence;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{AspectAnnotation, ParsedSentence, Source};

    fn sent(id: &str, text: &str, terms: &[&str]) -> AnnotatedSentence {
        let mut s = AnnotatedSentence::new(ParsedSentence::unparsed(id, text));
        for t in terms {
            let start = text.find(t).unwrap();
            s.annotations.push(AspectAnnotation {
                term: t.to_string(),
                char_start: start,
                char_end: start + t.len(),
                polarity: None,
                source: Source::Gold,
            });
        }
        s
    }

    const TEXT: &str = "I liked the service and the staff, but not the food.";

    #[test]
    fn partial_recall() {
        let p = [sent("1", TEXT, &["service", "staff"])];
        let g = [sent("1", TEXT, &["service", "staff", "food"])];
        let r = evaluate_ate(&p, &g, MatchMode::String).unwrap();
        assert_eq!((r.tp, r.fp, r.fn_), (2, 0, 1));
        assert_eq!(r.precision, 1.0);
        assert!((r.recall - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.f1 - 0.8).abs() < 1e-12);
    }

    #[test]
    fn empty_is_zero() {
        let p = [sent("1", "x", &[])];
        let r = evaluate_ate(&p, &p, MatchMode::Span).unwrap();
        assert_eq!((r.tp, r.fp, r.fn_, r.precision, r.recall, r.f1), (0, 0, 0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn no_stemming() {
        let p = [sent("1", "foods and food", &["foods"])];
        let g = [sent("1", "foods and food", &["food"])];
        let r = evaluate_ate(&p, &g, MatchMode::String).unwrap();
        assert_eq!((r.tp, r.fp, r.fn_), (0, 1, 1));
    }

    #[test]
    fn modes_differ_on_position() {
        let text = "tea then tea";
        let mut p = sent("1", text, &[]);
        p.annotations.push(AspectAnnotation {
            term: "tea".into(),
            char_start: 9,
            char_end: 12,
            polarity: None,
            source: Source::Llm,
        });
        let g = [sent("1", text, &["tea"])];
        let p = [p];
        assert_eq!(evaluate_ate(&p, &g, MatchMode::Span).unwrap().tp, 0);
        assert_eq!(evaluate_ate(&p, &g, MatchMode::String).unwrap().tp, 1);
    }

    #[test]
    fn id_mismatch_lists_ids() {
        let p = [sent("1", "x", &[]), sent("3", "x", &[])];
        let g = [sent("1", "x", &[]), sent("2", "x", &[])];
        match evaluate_ate(&p, &g, MatchMode::Span) {
            Err(EvalError::IdMismatch { missing_in_predicted, missing_in_gold }) => {
                assert_eq!(missing_in_predicted, vec!["2"]);
                assert_eq!(missing_in_gold, vec!["3"]);
            }
            other => panic!("{other:?}"),
        }
    }
}
