use std::io::Read;

use super::{AnnotatedSentence, AspectAnnotation, CorpusError, ParsedSentence, Polarity, Source};

/// Reads the SemEval-2014 review format:
/// `sentences > sentence[id] > (text, aspectTerms > aspectTerm[term polarity from to])`.
///
/// Annotations carry [`Source::Gold`]. Sentences have no tokens; attach a
/// parse separately with [`super::attach_parses`].
pub fn parse_semeval_xml<R: Read>(mut input: R) -> Result<Vec<AnnotatedSentence>, CorpusError> {
    let mut xml = String::new();
    input.read_to_string(&mut xml)?;
    let doc = roxmltree::Document::parse(&xml).map_err(|e| CorpusError::Parse {
        line: e.pos().row as usize,
        message: e.to_string(),
    })?;

    let mut out = Vec::new();
    for node in doc.descendants().filter(|n| n.has_tag_name("sentence")) {
        let id = node
            .attribute("id")
            .ok_or_else(|| CorpusError::Parse {
                line: doc.text_pos_at(node.range().start).row as usize,
                message: "sentence element without id attribute".into(),
            })?
            .to_string();
        let text = node
            .children()
            .find(|c| c.has_tag_name("text"))
            .map(|t| t.text().unwrap_or_default().to_string())
            .ok_or_else(|| CorpusError::Integrity {
                sentence_id: id.clone(),
                message: "missing text element".into(),
            })?;

        let mut annotations = Vec::new();
        let terms = node
            .children()
            .filter(|c| c.has_tag_name("aspectTerms"))
            .flat_map(|c| c.children().filter(|t| t.has_tag_name("aspectTerm")));
        for term_node in terms {
            let attr = |name: &str| {
                term_node.attribute(name).ok_or_else(|| CorpusError::Integrity {
                    sentence_id: id.clone(),
                    message: format!("aspectTerm without {name} attribute"),
                })
            };
            let offset = |name: &str| -> Result<usize, CorpusError> {
                let raw = attr(name)?;
                raw.parse().map_err(|_| CorpusError::Integrity {
                    sentence_id: id.clone(),
                    message: format!("aspectTerm {name}={raw:?} is not an offset"),
                })
            };
            let polarity = match term_node.attribute("polarity") {
                Some(p) => Some(p.parse::<Polarity>().map_err(|_| {
                    CorpusError::Validation(format!(
                        "sentence {id}: unknown polarity {p:?}"
                    ))
                })?),
                None => None,
            };
            annotations.push(AspectAnnotation {
                term: attr("term")?.to_string(),
                char_start: offset("from")?,
                char_end: offset("to")?,
                polarity,
                source: Source::Gold,
            });
        }

        let sentence = AnnotatedSentence {
            sentence: ParsedSentence::unparsed(id, text),
            annotations,
            split: None,
        };
        sentence.validate()?;
        out.push(sentence);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ONE: &str = r#"<?xml version="1.0" encoding="UTF-8"?>
<sentences>
    <sentence id="813">
        <text>All the appetizers and salads were fabulous, the food was cold.</text>
        <aspectTerms>
            <aspectTerm term="food" polarity="negative" from="49" to="53"/>
        </aspectTerms>
    </sentence>
    <sentence id="814">
        <text>Nothing to see here.</text>
        <aspectTerms>
        </aspectTerms>
    </sentence>
    <sentence id="815">
        <text>Fish &amp; chips were good.</text>
    </sentence>
</sentences>"#;

    #[test]
    fn parses_terms_and_empty_sentences() {
        let corpus = parse_semeval_xml(ONE.as_bytes()).unwrap();
        assert_eq!(corpus.len(), 3);
        let a = &corpus[0].annotations[0];
        assert_eq!(a.term, "food");
        assert_eq!((a.char_start, a.char_end), (49, 53));
        assert_eq!(a.polarity, Some(Polarity::Negative));
        assert_eq!(a.source, Source::Gold);
        assert!(corpus[1].annotations.is_empty());
        assert!(corpus[2].annotations.is_empty());
        assert_eq!(corpus[2].text(), "Fish & chips were good.");
        assert!(!corpus[0].sentence.is_parsed());
    }

    #[test]
    fn entity_decoded_term_matches() {
        let xml = r#"<sentences><sentence id="1"><text>Fish &amp; chips rock</text>
            <aspectTerms><aspectTerm term="Fish &amp; chips" polarity="positive" from="0" to="12"/></aspectTerms>
            </sentence></sentences>"#;
        let corpus = parse_semeval_xml(xml.as_bytes()).unwrap();
        assert_eq!(corpus[0].annotations[0].term, "Fish & chips");
    }

    #[test]
    fn slice_mismatch_is_integrity_error() {
        let xml = r#"<sentences><sentence id="9"><text>the foo is cold</text>
            <aspectTerms><aspectTerm term="food" polarity="negative" from="4" to="8"/></aspectTerms>
            </sentence></sentences>"#;
        match parse_semeval_xml(xml.as_bytes()) {
            Err(CorpusError::Integrity { sentence_id, .. }) => assert_eq!(sentence_id, "9"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_polarity_is_validation_error() {
        let xml = r#"<sentences><sentence id="9"><text>food</text>
            <aspectTerms><aspectTerm term="food" polarity="meh" from="0" to="4"/></aspectTerms>
            </sentence></sentences>"#;
        assert!(matches!(
            parse_semeval_xml(xml.as_bytes()),
            Err(CorpusError::Validation(_))
        ));
    }
}
