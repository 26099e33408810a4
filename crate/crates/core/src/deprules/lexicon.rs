use std::collections::HashSet;
use std::path::Path;

use super::DeprulesError;

const DEFAULT_STOPWORDS: &str = include_str!("../../data/stopwords.txt");
const DEFAULT_POSITIVE: &str = include_str!("../../data/positive-words.txt");
const DEFAULT_NEGATIVE: &str = include_str!("../../data/negative-words.txt");

/// Stopword and opinion-word sets, stored lowercased.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicons {
    pub stopwords: HashSet<String>,
    pub opinion_words: HashSet<String>,
}

/// One word per line; blank lines and lines starting with `;` are skipped.
pub fn parse_word_list(source: &str) -> HashSet<String> {
    source
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with(';'))
        .map(str::to_lowercase)
        .collect()
}

fn read_list(path: &Path) -> Result<HashSet<String>, DeprulesError> {
    std::fs::read_to_string(path)
        .map(|s| parse_word_list(&s))
        .map_err(|source| DeprulesError::Io {
            path: path.display().to_string(),
            source,
        })
}

impl Default for Lexicons {
    fn default() -> Self {
        let mut opinion_words = parse_word_list(DEFAULT_POSITIVE);
        opinion_words.extend(parse_word_list(DEFAULT_NEGATIVE));
        Lexicons {
            stopwords: parse_word_list(DEFAULT_STOPWORDS),
            opinion_words,
        }
    }
}

impl Lexicons {
    pub fn new<I, J, S, T>(stopwords: I, opinion_words: J) -> Self
    where
        I: IntoIterator<Item = S>,
        J: IntoIterator<Item = T>,
        S: AsRef<str>,
        T: AsRef<str>,
    {
        Lexicons {
            stopwords: stopwords.into_iter().map(|s| s.as_ref().to_lowercase()).collect(),
            opinion_words: opinion_words
                .into_iter()
                .map(|s| s.as_ref().to_lowercase())
                .collect(),
        }
    }

    /// Loads lexicons, replacing each shipped default whose path is given.
    /// The opinion set is the union of the positive and negative lists.
    pub fn load(
        stopwords: Option<&Path>,
        positive: Option<&Path>,
        negative: Option<&Path>,
    ) -> Result<Self, DeprulesError> {
        let stopwords = match stopwords {
            Some(p) => read_list(p)?,
            None => parse_word_list(DEFAULT_STOPWORDS),
        };
        let mut opinion_words = match positive {
            Some(p) => read_list(p)?,
            None => parse_word_list(DEFAULT_POSITIVE),
        };
        opinion_words.extend(match negative {
            Some(p) => read_list(p)?,
            None => parse_word_list(DEFAULT_NEGATIVE),
        });
        Ok(Lexicons {
            stopwords,
            opinion_words,
        })
    }

    pub fn is_stopword(&self, word: &str) -> bool {
        self.stopwords.contains(&word.to_lowercase())
    }

    pub fn is_opinion_word(&self, word: &str) -> bool {
        self.opinion_words.contains(&word.to_lowercase())
    }
}
