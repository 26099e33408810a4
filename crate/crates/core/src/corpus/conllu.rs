use std::io::BufRead;

use super::{normalize_deprel, CorpusError, ParsedSentence, Token};

struct RawToken {
    index: usize,
    form: String,
    upos: String,
    xpos: Option<String>,
    head: usize,
    deprel: String,
}

#[derive(Default)]
struct Block {
    sent_id: Option<String>,
    text: Option<String>,
    tokens: Vec<RawToken>,
    has_lines: bool,
}

fn absent(field: &str) -> Option<String> {
    (field != "_" && !field.is_empty()).then(|| field.to_string())
}

/// Parses CoNLL-U into sentences. Multiword-token ranges and empty nodes are
/// skipped; relation subtypes are stripped.
pub fn parse_conllu<R: BufRead>(input: R) -> Result<Vec<ParsedSentence>, CorpusError> {
    let mut sentences = Vec::new();
    let mut block = Block::default();

    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let line = line.trim_end_matches('\r');

        if line.trim().is_empty() {
            if block.has_lines {
                let counter = sentences.len() + 1;
                sentences.push(finish_block(std::mem::take(&mut block), counter)?);
            }
            continue;
        }
        block.has_lines = true;

        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim_start();
            if let Some(v) = comment.strip_prefix("sent_id") {
                if let Some(v) = v.trim_start().strip_prefix('=') {
                    block.sent_id = Some(v.trim().to_string());
                }
            } else if let Some(v) = comment.strip_prefix("text") {
                if let Some(v) = v.trim_start().strip_prefix('=') {
                    block.text = Some(v.trim().to_string());
                }
            }
            continue;
        }

        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(CorpusError::Parse {
                line: lineno,
                message: format!("expected 10 tab-separated columns, found {}", cols.len()),
            });
        }
        let id = cols[0];
        if id.contains('-') || id.contains('.') {
            continue;
        }
        let index: usize = id.parse().map_err(|_| CorpusError::Parse {
            line: lineno,
            message: format!("non-integer ID {id:?}"),
        })?;
        let head: usize = cols[6].parse().map_err(|_| CorpusError::Parse {
            line: lineno,
            message: format!("non-integer HEAD {:?}", cols[6]),
        })?;
        block.tokens.push(RawToken {
            index,
            form: cols[1].to_string(),
            upos: cols[3].to_string(),
            xpos: absent(cols[4]),
            head,
            deprel: normalize_deprel(cols[7]),
        });
    }
    if block.has_lines {
        let counter = sentences.len() + 1;
        sentences.push(finish_block(block, counter)?);
    }
    Ok(sentences)
}

fn finish_block(block: Block, counter: usize) -> Result<ParsedSentence, CorpusError> {
    let id = block.sent_id.unwrap_or_else(|| counter.to_string());
    let structure = |message: String| CorpusError::Structure {
        sentence_id: id.clone(),
        message,
    };

    let text = match block.text {
        Some(t) => t,
        None => block
            .tokens
            .iter()
            .map(|t| t.form.as_str())
            .collect::<Vec<_>>()
            .join(" "),
    };

    // Align forms left to right, allowing whitespace between tokens.
    let chars: Vec<char> = text.chars().collect();
    let mut cursor = 0;
    let mut tokens = Vec::with_capacity(block.tokens.len());
    for raw in block.tokens {
        while cursor < chars.len() && chars[cursor].is_whitespace() {
            cursor += 1;
        }
        let form: Vec<char> = raw.form.chars().collect();
        let end = cursor + form.len();
        if form.is_empty() || end > chars.len() || chars[cursor..end] != form[..] {
            return Err(structure(format!(
                "token {} form {:?} does not align with the sentence text at offset {cursor}",
                raw.index, raw.form
            )));
        }
        tokens.push(Token {
            index: raw.index,
            form: raw.form,
            char_start: cursor,
            char_end: end,
            upos: raw.upos,
            xpos: raw.xpos,
            head: raw.head,
            deprel: raw.deprel,
        });
        cursor = end;
    }

    let sentence = ParsedSentence { id, text, tokens };
    sentence.validate()?;
    Ok(sentence)
}
