use serde::{Deserialize, Serialize};

use super::{render_asc_text, render_ate_text, Task};
use crate::corpus::{AnnotatedSentence, Polarity};

/// A seq2seq fine-tuning example.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingPair {
    pub input: String,
    pub output: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExportOutcome {
    pub pairs: Vec<TrainingPair>,
    /// Sentiment examples skipped because the annotation has no polarity.
    pub skipped_absent: usize,
    /// Sentiment examples skipped because the polarity is conflict.
    pub skipped_conflict: usize,
}

/// Output used for an extraction example with no aspect terms.
pub const NO_TERMS: &str = "none";

/// Builds training pairs with `eos` appended to both input and output.
///
/// Extraction emits one pair per sentence; the target lists every annotated
/// term once per span, in text order, joined by `", "`. Sentiment emits one
/// pair per annotation carrying a scored polarity.
pub fn export_training_pairs(corpus: &[AnnotatedSentence], task: Task, eos: &str) -> ExportOutcome {
    let mut out = ExportOutcome::default();
    for s in corpus {
        match task {
            Task::Ate => {
                let mut spans: Vec<_> = s.annotations.iter().collect();
                spans.sort_by_key(|a| (a.char_start, a.char_end));
                spans.dedup_by_key(|a| a.span());
                let target = if spans.is_empty() {
                    NO_TERMS.to_string()
                } else {
                    spans.iter().map(|a| a.term.as_str()).collect::<Vec<_>>().join(", ")
                };
                out.pairs.push(TrainingPair {
                    input: format!("{}{eos}", render_ate_text(s.text())),
                    output: format!("{target}{eos}"),
                });
            }
            Task::Asc => {
                let mut anns: Vec<_> = s.annotations.iter().collect();
                anns.sort_by_key(|a| (a.char_start, a.char_end));
                for a in anns {
                    match a.polarity {
                        None => out.skipped_absent += 1,
                        Some(Polarity::Conflict) => out.skipped_conflict += 1,
                        Some(p) => out.pairs.push(TrainingPair {
                            input: format!("{}{eos}", render_asc_text(&a.term, s.text())),
                            output: format!("{p}{eos}"),
                        }),
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{AspectAnnotation, ParsedSentence, Source};

    fn sentence(id: &str, text: &str, terms: &[(&str, usize, Option<Polarity>)]) -> AnnotatedSentence {
        let mut s = AnnotatedSentence::new(ParsedSentence::unparsed(id, text));
        for &(term, start, polarity) in terms {
            s.annotations.push(AspectAnnotation {
                term: term.into(),
                char_start: start,
                char_end: start + term.chars().count(),
                polarity,
                source: Source::Gold,
            });
        }
        s
    }

    #[test]
    fn ate_pair() {
        let text = "I thought hilary swank was great";
        let c = vec![sentence("1", text, &[("hilary swank", 10, None)])];
        let out = export_training_pairs(&c, Task::Ate, "</s>");
        assert_eq!(out.pairs.len(), 1);
        assert_eq!(out.pairs[0].output, "hilary swank</s>");
        assert_eq!(
            out.pairs[0].input,
            format!("Extract aspect terms from the following input. \n\ninput: {text}</s>")
        );
    }

    #[test]
    fn ate_orders_by_position_and_handles_empty() {
        let text = "The staff was friendly and the service fast";
        let c = vec![
            sentence("1", text, &[("service", 31, None), ("staff", 4, None)]),
            sentence("2", "Nothing here", &[]),
        ];
        let out = export_training_pairs(&c, Task::Ate, "</s>");
        assert_eq!(out.pairs[0].output, "staff, service</s>");
        assert_eq!(out.pairs[1].output, "none</s>");
        let bare = export_training_pairs(&c, Task::Ate, "");
        assert_eq!(bare.pairs[0].output, "staff, service");
        assert!(bare.pairs[0].input.ends_with("service fast"));
    }

    #[test]
    fn asc_skips_unscored() {
        let text = "food bad drinks ok view";
        let c = vec![sentence(
            "1",
            text,
            &[
                ("food", 0, Some(Polarity::Negative)),
                ("drinks", 9, None),
                ("view", 19, Some(Polarity::Conflict)),
            ],
        )];
        let out = export_training_pairs(&c, Task::Asc, "</s>");
        assert_eq!(out.pairs.len(), 1);
        assert_eq!(out.pairs[0].output, "negative</s>");
        assert!(out.pairs[0].input.contains("aspect term: food\n\nsentence: "));
        assert_eq!((out.skipped_absent, out.skipped_conflict), (1, 1));
    }
}
