use serde::{Deserialize, Serialize};

use super::prompt::{render_asc_text, render_ate_text};
use super::{
    collect_results, map_bounded, CompletionBackend, CompletionRequest, ProviderConfig,
    ProviderError, Task,
};
use crate::corpus::{find_ci, AnnotatedSentence, AspectAnnotation, ParsedSentence, Polarity, Source};

/// A completion fragment that could not be turned into an annotation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reject {
    pub id: String,
    pub task: Task,
    pub term: Option<String>,
    pub item: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AteOutcome {
    pub corpus: Vec<AnnotatedSentence>,
    pub rejects: Vec<Reject>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AscOutcome {
    pub corpus: Vec<AnnotatedSentence>,
    pub rejects: Vec<Reject>,
}

fn strip_eos<'a>(completion: &'a str, eos: &str) -> &'a str {
    let trimmed = completion.trim();
    if eos.is_empty() {
        trimmed
    } else {
        trimmed.strip_suffix(eos).unwrap_or(trimmed).trim()
    }
}

/// Splits a term-list completion on commas; items are trimmed and lowercased.
/// An empty completion or the literal `none` means no terms.
pub fn parse_term_list(completion: &str, eos: &str) -> Vec<String> {
    let body = strip_eos(completion, eos);
    if body.is_empty() || body.eq_ignore_ascii_case("none") {
        return Vec::new();
    }
    body.split(',')
        .map(|item| item.trim().to_lowercase())
        .filter(|item| !item.is_empty())
        .collect()
}

/// Places each item at its leftmost case-insensitive occurrence in `text`
/// that does not overlap an already placed item. Longer items are placed
/// first so a short item cannot claim the inside of a longer one. Returns
/// annotations ordered by offset plus `(item, reason)` for unplaced items.
pub fn locate_terms(
    text: &str,
    items: &[String],
    source: Source,
) -> (Vec<AspectAnnotation>, Vec<(String, String)>) {
    let chars: Vec<char> = text.chars().collect();
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(items[i].chars().count()));

    let mut placed: Vec<AspectAnnotation> = Vec::new();
    let mut rejects = Vec::new();
    for i in order {
        let needle: Vec<char> = items[i].chars().collect();
        let mut from = 0;
        let mut found_any = false;
        let mut slot = None;
        while let Some(start) = find_ci(&chars, &needle, from) {
            found_any = true;
            let end = start + needle.len();
            if placed.iter().all(|a| end <= a.char_start || a.char_end <= start) {
                slot = Some((start, end));
                break;
            }
            from = start + 1;
        }
        match slot {
            Some((start, end)) => placed.push(AspectAnnotation {
                term: chars[start..end].iter().collect(),
                char_start: start,
                char_end: end,
                polarity: None,
                source,
            }),
            None => rejects.push((
                items[i].clone(),
                if found_any {
                    "every occurrence overlaps another extracted term".to_string()
                } else {
                    "not found in sentence text".to_string()
                },
            )),
        }
    }
    placed.sort_by_key(|a| (a.char_start, a.char_end));
    (placed, rejects)
}

/// Runs aspect-term extraction prompts over the corpus and turns each
/// completion into located `llm` annotations.
pub fn annotate_ate(
    corpus: &[ParsedSentence],
    backend: &dyn CompletionBackend,
    config: &ProviderConfig,
) -> Result<AteOutcome, ProviderError> {
    config.validate()?;
    let requests: Vec<CompletionRequest> = corpus
        .iter()
        .map(|s| CompletionRequest {
            sentence_id: s.id.clone(),
            task: Task::Ate,
            term: None,
            prompt: render_ate_text(&s.text),
        })
        .collect();
    let completions = collect_results(map_bounded(&requests, config.max_in_flight, |r| {
        backend.complete(r)
    }))?;

    let mut out = Vec::with_capacity(corpus.len());
    let mut rejects = Vec::new();
    for (sentence, completion) in corpus.iter().zip(completions) {
        let items = parse_term_list(&completion, &config.eos_marker);
        let (annotations, missed) = locate_terms(&sentence.text, &items, Source::Llm);
        rejects.extend(missed.into_iter().map(|(item, reason)| Reject {
            id: sentence.id.clone(),
            task: Task::Ate,
            term: None,
            item,
            reason,
        }));
        out.push(AnnotatedSentence {
            sentence: sentence.clone(),
            annotations,
            split: None,
        });
    }
    Ok(AteOutcome {
        corpus: out,
        rejects,
    })
}

/// Maps a sentiment completion onto a polarity: trimmed, lowercased, with any
/// end marker and trailing `.`/`!` removed. Only the three scored classes are
/// accepted.
pub fn normalize_polarity(completion: &str, eos: &str) -> Option<Polarity> {
    let lowered = strip_eos(completion, eos).to_lowercase();
    let word = lowered.trim_end_matches(['.', '!']).trim();
    match word {
        "positive" => Some(Polarity::Positive),
        "negative" => Some(Polarity::Negative),
        "neutral" => Some(Polarity::Neutral),
        _ => None,
    }
}

/// Fills the polarity of every annotation with the sentiment prompt's answer.
/// Unusable answers leave the polarity absent and are reported as rejects.
pub fn annotate_asc(
    corpus: Vec<AnnotatedSentence>,
    backend: &dyn CompletionBackend,
    config: &ProviderConfig,
) -> Result<AscOutcome, ProviderError> {
    config.validate()?;
    let mut requests = Vec::new();
    for sentence in &corpus {
        for ann in &sentence.annotations {
            if ann.term.is_empty() {
                return Err(ProviderError::Validation(format!(
                    "sentence {}: annotation without a term",
                    sentence.id()
                )));
            }
            requests.push(CompletionRequest {
                sentence_id: sentence.id().to_string(),
                task: Task::Asc,
                term: Some(ann.term.clone()),
                prompt: render_asc_text(&ann.term, sentence.text()),
            });
        }
    }
    let completions = collect_results(map_bounded(&requests, config.max_in_flight, |r| {
        backend.complete(r)
    }))?;

    let mut answers = completions.into_iter();
    let mut rejects = Vec::new();
    let mut out = corpus;
    for sentence in &mut out {
        let id = sentence.sentence.id.clone();
        for ann in &mut sentence.annotations {
            let completion = answers.next().expect("one completion per annotation");
            ann.polarity = normalize_polarity(&completion, &config.eos_marker);
            if ann.polarity.is_none() {
                rejects.push(Reject {
                    id: id.clone(),
                    task: Task::Asc,
                    term: Some(ann.term.clone()),
                    item: completion,
                    reason: "not one of positive, negative, neutral".into(),
                });
            }
        }
    }
    Ok(AscOutcome {
        corpus: out,
        rejects,
    })
}
