//! Canonical sentence and annotation model plus the corpus formats the
//! pipeline reads and writes: CoNLL-U parses, SemEval-2014 review XML and the
//! JSONL interchange used between stages.

mod attach;
mod conllu;
mod jsonl;
mod semeval;
mod text;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use attach::{attach_parses, AttachOptions};
pub use conllu::parse_conllu;
pub use jsonl::{read_jsonl, write_jsonl, write_jsonl_string};
pub use semeval::parse_semeval_xml;
pub use text::{char_len, char_slice, find_ci};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("sentence {sentence_id}: malformed dependency tree: {message}")]
    Structure { sentence_id: String, message: String },
    #[error("sentence {sentence_id}: {message}")]
    Integrity { sentence_id: String, message: String },
    #[error("line {line}: field `{field}`: {message}")]
    Schema {
        line: usize,
        field: String,
        message: String,
    },
    #[error("{0}")]
    Validation(String),
    #[error("no parse for sentence ids: {}", .0.join(", "))]
    MissingParses(Vec<String>),
    #[error("sentence {id}: text mismatch between gold {gold:?} and parse {parsed:?}")]
    TextMismatch {
        id: String,
        gold: String,
        parsed: String,
    },
    #[error("sentence {id}: annotation [{start}, {end}) does not align with token boundaries")]
    Boundary { id: String, start: usize, end: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One syntactic word of a parsed sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    /// 1-based position in the sentence.
    pub index: usize,
    pub form: String,
    /// Half-open character offsets into the sentence text.
    pub char_start: usize,
    pub char_end: usize,
    pub upos: String,
    pub xpos: Option<String>,
    /// Index of the governor, 0 for the root.
    pub head: usize,
    /// Lowercased universal relation with any `:subtype` removed.
    pub deprel: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedSentence {
    pub id: String,
    pub text: String,
    /// Empty when no dependency parse has been attached.
    pub tokens: Vec<Token>,
}

impl ParsedSentence {
    pub fn unparsed(id: impl Into<String>, text: impl Into<String>) -> Self {
        ParsedSentence {
            id: id.into(),
            text: text.into(),
            tokens: Vec::new(),
        }
    }

    pub fn is_parsed(&self) -> bool {
        !self.tokens.is_empty()
    }

    /// Token by its 1-based index.
    pub fn token(&self, index: usize) -> Option<&Token> {
        index.checked_sub(1).and_then(|i| self.tokens.get(i))
    }

    /// Checks the token invariants: sequential indices, in-range heads,
    /// non-overlapping monotone offsets that reproduce the text, and a
    /// single-rooted acyclic head structure.
    pub fn validate(&self) -> Result<(), CorpusError> {
        let fail = |message: String| CorpusError::Structure {
            sentence_id: self.id.clone(),
            message,
        };
        let n = self.tokens.len();
        if n == 0 {
            return Err(fail("sentence has no tokens".into()));
        }
        let text_len = char_len(&self.text);
        let mut prev_end = 0;
        for (pos, tok) in self.tokens.iter().enumerate() {
            if tok.index != pos + 1 {
                return Err(fail(format!(
                    "token at position {} has index {}",
                    pos + 1,
                    tok.index
                )));
            }
            if tok.head > n {
                return Err(fail(format!(
                    "token {} has head {} outside 0..={n}",
                    tok.index, tok.head
                )));
            }
            if tok.head == tok.index {
                return Err(fail(format!("token {} is its own head", tok.index)));
            }
            if tok.char_start >= tok.char_end || tok.char_end > text_len {
                return Err(fail(format!(
                    "token {} has invalid offsets [{}, {})",
                    tok.index, tok.char_start, tok.char_end
                )));
            }
            if tok.char_start < prev_end {
                return Err(fail(format!("token {} overlaps its predecessor", tok.index)));
            }
            if char_slice(&self.text, tok.char_start, tok.char_end) != Some(tok.form.as_str()) {
                return Err(fail(format!(
                    "token {} form {:?} does not match the text at [{}, {})",
                    tok.index, tok.form, tok.char_start, tok.char_end
                )));
            }
            prev_end = tok.char_end;
        }

        let roots: Vec<usize> = self
            .tokens
            .iter()
            .filter(|t| t.head == 0)
            .map(|t| t.index)
            .collect();
        if roots.len() != 1 {
            return Err(fail(format!(
                "expected exactly one root, found {}",
                roots.len()
            )));
        }

        // Every token must reach the root within n steps.
        for tok in &self.tokens {
            let mut cur = tok.index;
            let mut steps = 0;
            while cur != 0 {
                cur = self.tokens[cur - 1].head;
                steps += 1;
                if steps > n {
                    return Err(fail(format!("cycle through token {}", tok.index)));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Positive,
    Negative,
    Neutral,
    Conflict,
}

impl Polarity {
    /// The three classes scored by sentiment classification.
    pub const SCORED: [Polarity; 3] = [Polarity::Positive, Polarity::Negative, Polarity::Neutral];

    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Positive => "positive",
            Polarity::Negative => "negative",
            Polarity::Neutral => "neutral",
            Polarity::Conflict => "conflict",
        }
    }

    /// Position in [`Polarity::SCORED`], `None` for conflict.
    pub fn class_index(self) -> Option<usize> {
        match self {
            Polarity::Positive => Some(0),
            Polarity::Negative => Some(1),
            Polarity::Neutral => Some(2),
            Polarity::Conflict => None,
        }
    }
}

impl FromStr for Polarity {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "positive" => Ok(Polarity::Positive),
            "negative" => Ok(Polarity::Negative),
            "neutral" => Ok(Polarity::Neutral),
            "conflict" => Ok(Polarity::Conflict),
            other => Err(CorpusError::Validation(format!(
                "unknown polarity {other:?}"
            ))),
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Provenance of an aspect annotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Source {
    Gold,
    Llm,
    Dep,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Gold => "gold",
            Source::Llm => "llm",
            Source::Dep => "dep",
        }
    }
}

impl FromStr for Source {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gold" => Ok(Source::Gold),
            "llm" => Ok(Source::Llm),
            "dep" => Ok(Source::Dep),
            other => Err(CorpusError::Validation(format!("unknown source {other:?}"))),
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AspectAnnotation {
    pub term: String,
    pub char_start: usize,
    pub char_end: usize,
    pub polarity: Option<Polarity>,
    pub source: Source,
}

impl AspectAnnotation {
    pub fn span(&self) -> (usize, usize) {
        (self.char_start, self.char_end)
    }

    /// True when the two spans share at least one character.
    pub fn overlaps(&self, other: &AspectAnnotation) -> bool {
        self.char_start < other.char_end && other.char_start < self.char_end
    }

    pub fn validate(&self, sentence_id: &str, text: &str) -> Result<(), CorpusError> {
        let fail = |message: String| CorpusError::Integrity {
            sentence_id: sentence_id.to_string(),
            message,
        };
        if self.char_start >= self.char_end {
            return Err(fail(format!(
                "empty or inverted span [{}, {}) for term {:?}",
                self.char_start, self.char_end, self.term
            )));
        }
        match char_slice(text, self.char_start, self.char_end) {
            Some(slice) if slice == self.term => {}
            Some(slice) => {
                return Err(fail(format!(
                    "span [{}, {}) reads {slice:?}, expected term {:?}",
                    self.char_start, self.char_end, self.term
                )))
            }
            None => {
                return Err(fail(format!(
                    "span [{}, {}) is outside the text",
                    self.char_start, self.char_end
                )))
            }
        }
        if self.polarity == Some(Polarity::Conflict) && self.source != Source::Gold {
            return Err(fail(format!(
                "conflict polarity on a {} annotation",
                self.source
            )));
        }
        Ok(())
    }
}

/// Named subsets of a corpus produced by the hybrid split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SplitName {
    N,
    M,
    Q,
    S,
    R,
}

impl SplitName {
    pub fn as_str(self) -> &'static str {
        match self {
            SplitName::N => "N",
            SplitName::M => "M",
            SplitName::Q => "Q",
            SplitName::S => "S",
            SplitName::R => "R",
        }
    }
}

impl FromStr for SplitName {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "N" => Ok(SplitName::N),
            "M" => Ok(SplitName::M),
            "Q" => Ok(SplitName::Q),
            "S" => Ok(SplitName::S),
            "R" => Ok(SplitName::R),
            other => Err(CorpusError::Validation(format!("unknown split {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedSentence {
    pub sentence: ParsedSentence,
    pub annotations: Vec<AspectAnnotation>,
    pub split: Option<SplitName>,
}

impl AnnotatedSentence {
    pub fn new(sentence: ParsedSentence) -> Self {
        AnnotatedSentence {
            sentence,
            annotations: Vec::new(),
            split: None,
        }
    }

    pub fn id(&self) -> &str {
        &self.sentence.id
    }

    pub fn text(&self) -> &str {
        &self.sentence.text
    }

    pub fn annotations_from(&self, source: Source) -> impl Iterator<Item = &AspectAnnotation> {
        self.annotations.iter().filter(move |a| a.source == source)
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        if self.sentence.is_parsed() {
            self.sentence.validate()?;
        }
        let mut seen = HashSet::new();
        for ann in &self.annotations {
            ann.validate(self.id(), self.text())?;
            if !seen.insert((ann.source, ann.char_start, ann.char_end)) {
                return Err(CorpusError::Integrity {
                    sentence_id: self.id().to_string(),
                    message: format!(
                        "duplicate {} annotation at [{}, {})",
                        ann.source, ann.char_start, ann.char_end
                    ),
                });
            }
        }
        Ok(())
    }
}

/// An ordered set of sentence ids with a split name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusSplit {
    pub name: SplitName,
    pub ids: Vec<String>,
}

impl CorpusSplit {
    pub fn new(name: SplitName, ids: Vec<String>) -> Self {
        CorpusSplit { name, ids }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.ids.iter().any(|i| i == id)
    }

    /// Checks that `parts` are pairwise disjoint and that their union is
    /// exactly `self`.
    pub fn verify_partition(&self, parts: &[&CorpusSplit]) -> Result<(), CorpusError> {
        let whole: HashSet<&str> = self.ids.iter().map(String::as_str).collect();
        let mut seen: HashSet<&str> = HashSet::new();
        for part in parts {
            for id in &part.ids {
                if !whole.contains(id.as_str()) {
                    return Err(CorpusError::Validation(format!(
                        "split {} contains {id} which is not in {}",
                        part.name.as_str(),
                        self.name.as_str()
                    )));
                }
                if !seen.insert(id.as_str()) {
                    return Err(CorpusError::Validation(format!(
                        "sentence {id} appears in more than one part of {}",
                        self.name.as_str()
                    )));
                }
            }
        }
        if seen.len() != whole.len() {
            return Err(CorpusError::Validation(format!(
                "parts cover {} of {} sentences in {}",
                seen.len(),
                whole.len(),
                self.name.as_str()
            )));
        }
        Ok(())
    }
}

/// Lowercases a relation label and drops its subtype (`nmod:poss` → `nmod`).
pub fn normalize_deprel(deprel: &str) -> String {
    deprel
        .split(':')
        .next()
        .unwrap_or_default()
        .to_lowercase()
}
