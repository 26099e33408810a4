use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{
    AnnotatedSentence, AspectAnnotation, CorpusError, ParsedSentence, Polarity, Source, SplitName,
    Token,
};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Record {
    id: String,
    text: String,
    split: Option<String>,
    tokens: Option<Vec<TokenRecord>>,
    aspect_terms: Vec<TermRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TokenRecord {
    i: usize,
    form: String,
    start: usize,
    end: usize,
    upos: String,
    xpos: Option<String>,
    head: usize,
    deprel: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermRecord {
    term: String,
    from: usize,
    to: usize,
    polarity: Option<String>,
    source: String,
}

impl From<&AnnotatedSentence> for Record {
    fn from(s: &AnnotatedSentence) -> Self {
        Record {
            id: s.sentence.id.clone(),
            text: s.sentence.text.clone(),
            split: s.split.map(|n| n.as_str().to_string()),
            tokens: s.sentence.is_parsed().then(|| {
                s.sentence
                    .tokens
                    .iter()
                    .map(|t| TokenRecord {
                        i: t.index,
                        form: t.form.clone(),
                        start: t.char_start,
                        end: t.char_end,
                        upos: t.upos.clone(),
                        xpos: t.xpos.clone(),
                        head: t.head,
                        deprel: t.deprel.clone(),
                    })
                    .collect()
            }),
            aspect_terms: s
                .annotations
                .iter()
                .map(|a| TermRecord {
                    term: a.term.clone(),
                    from: a.char_start,
                    to: a.char_end,
                    polarity: a.polarity.map(|p| p.as_str().to_string()),
                    source: a.source.as_str().to_string(),
                })
                .collect(),
        }
    }
}

fn schema(line: usize, field: impl Into<String>, message: impl Into<String>) -> CorpusError {
    CorpusError::Schema {
        line,
        field: field.into(),
        message: message.into(),
    }
}

// serde_json reports missing/unknown fields as "... field `name` ...".
fn field_from_serde_message(message: &str) -> String {
    let mut parts = message.split('`');
    match (parts.next(), parts.next()) {
        (Some(prefix), Some(name)) if prefix.contains("field") => name.to_string(),
        _ => "record".to_string(),
    }
}

fn record_to_sentence(line: usize, rec: Record) -> Result<AnnotatedSentence, CorpusError> {
    let split = rec
        .split
        .as_deref()
        .map(|s| s.parse::<SplitName>())
        .transpose()
        .map_err(|e| schema(line, "split", e.to_string()))?;

    let tokens = match rec.tokens {
        None => Vec::new(),
        Some(toks) if toks.is_empty() => {
            return Err(schema(line, "tokens", "token list must be null or non-empty"))
        }
        Some(toks) => toks
            .into_iter()
            .map(|t| Token {
                index: t.i,
                form: t.form,
                char_start: t.start,
                char_end: t.end,
                upos: t.upos,
                xpos: t.xpos,
                head: t.head,
                deprel: t.deprel,
            })
            .collect(),
    };

    let mut annotations = Vec::with_capacity(rec.aspect_terms.len());
    for (k, t) in rec.aspect_terms.into_iter().enumerate() {
        let polarity = t
            .polarity
            .as_deref()
            .map(str::parse::<Polarity>)
            .transpose()
            .map_err(|e| schema(line, format!("aspect_terms[{k}].polarity"), e.to_string()))?;
        let source = t
            .source
            .parse::<Source>()
            .map_err(|e| schema(line, format!("aspect_terms[{k}].source"), e.to_string()))?;
        annotations.push(AspectAnnotation {
            term: t.term,
            char_start: t.from,
            char_end: t.to,
            polarity,
            source,
        });
    }

    let sentence = AnnotatedSentence {
        sentence: ParsedSentence {
            id: rec.id,
            text: rec.text,
            tokens,
        },
        annotations,
        split,
    };
    sentence.validate().map_err(|e| {
        let field = match e {
            CorpusError::Structure { .. } => "tokens",
            _ => "aspect_terms",
        };
        schema(line, field, e.to_string())
    })?;
    Ok(sentence)
}

/// Reads the line-delimited interchange format. Blank lines are ignored.
pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<AnnotatedSentence>, CorpusError> {
    let mut out = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = n + 1;
        if line.trim().is_empty() {
            continue;
        }
        let rec: Record = serde_json::from_str(&line).map_err(|e| {
            let message = e.to_string();
            schema(lineno, field_from_serde_message(&message), message)
        })?;
        out.push(record_to_sentence(lineno, rec)?);
    }
    Ok(out)
}

pub fn write_jsonl<W: Write>(
    corpus: &[AnnotatedSentence],
    mut out: W,
) -> Result<(), CorpusError> {
    for sentence in corpus {
        let line = serde_json::to_string(&Record::from(sentence))
            .map_err(|e| CorpusError::Validation(e.to_string()))?;
        out.write_all(line.as_bytes())?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_jsonl_string(corpus: &[AnnotatedSentence]) -> String {
    let mut buf = Vec::new();
    write_jsonl(corpus, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_corpus_round_trip() {
        assert_eq!(write_jsonl_string(&[]), "");
        assert!(read_jsonl("".as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn single_llm_annotation_round_trip() {
        let s = AnnotatedSentence {
            sentence: ParsedSentence::unparsed("a1", "The waiter brought food."),
            annotations: vec![AspectAnnotation {
                term: "waiter".into(),
                char_start: 4,
                char_end: 10,
                polarity: None,
                source: Source::Llm,
            }],
            split: Some(SplitName::M),
        };
        let text = write_jsonl_string(std::slice::from_ref(&s));
        assert_eq!(
            text,
            "{\"id\":\"a1\",\"text\":\"The waiter brought food.\",\"split\":\"M\",\"tokens\":null,\
             \"aspect_terms\":[{\"term\":\"waiter\",\"from\":4,\"to\":10,\"polarity\":null,\"source\":\"llm\"}]}\n"
        );
        assert_eq!(read_jsonl(text.as_bytes()).unwrap(), vec![s]);
    }

    #[test]
    fn bad_polarity_names_line_and_field() {
        let input = "\n{\"id\":\"x\",\"text\":\"food\",\"split\":null,\"tokens\":null,\
                     \"aspect_terms\":[{\"term\":\"food\",\"from\":0,\"to\":4,\"polarity\":\"meh\",\"source\":\"gold\"}]}\n";
        match read_jsonl(input.as_bytes()) {
            Err(CorpusError::Schema { line, field, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(field, "aspect_terms[0].polarity");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_field_is_named() {
        let input = "{\"id\":\"x\",\"split\":null,\"tokens\":null,\"aspect_terms\":[]}";
        match read_jsonl(input.as_bytes()) {
            Err(CorpusError::Schema { line, field, .. }) => {
                assert_eq!(line, 1);
                assert_eq!(field, "text");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn span_mismatch_is_rejected() {
        let input = "{\"id\":\"x\",\"text\":\"foo\",\"split\":null,\"tokens\":null,\
                     \"aspect_terms\":[{\"term\":\"food\",\"from\":0,\"to\":3,\"polarity\":null,\"source\":\"llm\"}]}";
        assert!(matches!(
            read_jsonl(input.as_bytes()),
            Err(CorpusError::Schema { .. })
        ));
    }
}
