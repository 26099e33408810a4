use crate::corpus::ParsedSentence;

use super::ProviderError;

pub const ATE_INSTRUCTION: &str = "Extract aspect terms from the following input. ";
pub const ASC_INSTRUCTION: &str = "Given the aspect term and the sentence. Predict if the aspect term in the sentence has a positive, negative or neutral sentiment expressed on it. ";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtePrompt {
    pub sentence_id: String,
    pub rendered: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AscPrompt {
    pub sentence_id: String,
    pub term: String,
    pub rendered: String,
}

pub fn render_ate_text(text: &str) -> String {
    format!("{ATE_INSTRUCTION}\n\ninput: {text}")
}

pub fn render_asc_text(term: &str, text: &str) -> String {
    format!("{ASC_INSTRUCTION}\n\naspect term: {term}\n\nsentence: {text}")
}

/// Aspect-term extraction prompt. The end-of-sequence marker is never part
/// of the wire prompt; see [`super::export_training_pairs`].
pub fn render_ate_prompt(sentence: &ParsedSentence) -> AtePrompt {
    AtePrompt {
        sentence_id: sentence.id.clone(),
        rendered: render_ate_text(&sentence.text),
    }
}

pub fn render_asc_prompt(sentence: &ParsedSentence, term: &str) -> Result<AscPrompt, ProviderError> {
    if term.is_empty() {
        return Err(ProviderError::Validation(format!(
            "sentence {}: empty aspect term for sentiment prompt",
            sentence.id
        )));
    }
    Ok(AscPrompt {
        sentence_id: sentence.id.clone(),
        term: term.to_string(),
        rendered: render_asc_text(term, &sentence.text),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ate_template() {
        let p = render_ate_prompt(&ParsedSentence::unparsed("1", "great battery"));
        assert_eq!(
            p.rendered,
            "Extract aspect terms from the following input. \n\ninput: great battery"
        );
        let empty = render_ate_prompt(&ParsedSentence::unparsed("2", ""));
        assert_eq!(empty.rendered, "Extract aspect terms from the following input. \n\ninput: ");
        let nl = render_ate_prompt(&ParsedSentence::unparsed("3", "a\nb"));
        assert!(nl.rendered.ends_with("input: a\nb"));
    }

    #[test]
    fn asc_template() {
        let s = ParsedSentence::unparsed("1", "food was cold");
        assert_eq!(
            render_asc_prompt(&s, "food").unwrap().rendered,
            "Given the aspect term and the sentence. Predict if the aspect term in the sentence \
             has a positive, negative or neutral sentiment expressed on it. \n\naspect term: food\
             \n\nsentence: food was cold"
        );
        assert!(render_asc_prompt(&s, "").is_err());
    }
}
