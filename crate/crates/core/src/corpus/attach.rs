use std::collections::HashMap;

use super::{AnnotatedSentence, CorpusError, ParsedSentence};

#[derive(Debug, Clone, Copy, Default)]
pub struct AttachOptions {
    /// Accept annotations that start or end inside a token.
    pub allow_partial_tokens: bool,
}

/// Joins dependency parses onto annotated sentences by id.
pub fn attach_parses(
    gold: Vec<AnnotatedSentence>,
    parses: Vec<ParsedSentence>,
    options: AttachOptions,
) -> Result<Vec<AnnotatedSentence>, CorpusError> {
    let mut by_id: HashMap<String, ParsedSentence> = HashMap::with_capacity(parses.len());
    for parse in parses {
        if let Some(dup) = by_id.insert(parse.id.clone(), parse) {
            return Err(CorpusError::Validation(format!(
                "parse for sentence {} appears more than once",
                dup.id
            )));
        }
    }

    let missing: Vec<String> = gold
        .iter()
        .filter(|s| !by_id.contains_key(s.id()))
        .map(|s| s.id().to_string())
        .collect();
    if !missing.is_empty() {
        return Err(CorpusError::MissingParses(missing));
    }

    let mut out = Vec::with_capacity(gold.len());
    for mut sentence in gold {
        let parse = by_id
            .remove(sentence.id())
            .ok_or_else(|| CorpusError::Validation(format!(
                "sentence {} appears more than once in the gold corpus",
                sentence.id()
            )))?;
        if parse.text != sentence.sentence.text {
            return Err(CorpusError::TextMismatch {
                id: parse.id,
                gold: sentence.sentence.text,
                parsed: parse.text,
            });
        }
        if !options.allow_partial_tokens {
            for ann in &sentence.annotations {
                let starts = parse.tokens.iter().any(|t| t.char_start == ann.char_start);
                let ends = parse.tokens.iter().any(|t| t.char_end == ann.char_end);
                if !(starts && ends) {
                    return Err(CorpusError::Boundary {
                        id: parse.id,
                        start: ann.char_start,
                        end: ann.char_end,
                    });
                }
            }
        }
        sentence.sentence.tokens = parse.tokens;
        out.push(sentence);
    }
    Ok(out)
}
