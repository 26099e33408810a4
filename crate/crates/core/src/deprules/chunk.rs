use std::collections::BTreeSet;

use super::pos_matches;
use crate::corpus::{char_slice, ParsedSentence};

const ABSORB_RELATIONS: [&str; 3] = ["compound", "flat", "nmod"];

/// A contiguous noun phrase over 1-based token indices `start..=end`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NounPhrase {
    pub head_index: usize,
    pub start: usize,
    pub end: usize,
    pub char_start: usize,
    pub char_end: usize,
    pub text: String,
}

impl NounPhrase {
    pub(crate) fn from_tokens(sentence: &ParsedSentence, head: usize, start: usize, end: usize) -> Self {
        let first = &sentence.tokens[start - 1];
        let last = &sentence.tokens[end - 1];
        NounPhrase {
            head_index: head,
            start,
            end,
            char_start: first.char_start,
            char_end: last.char_end,
            text: char_slice(&sentence.text, first.char_start, last.char_end)
                .unwrap_or_default()
                .to_string(),
        }
    }

    pub fn contains(&self, index: usize) -> bool {
        (self.start..=self.end).contains(&index)
    }
}

pub(crate) fn noun_tags() -> BTreeSet<String> {
    BTreeSet::from(["NN".to_string()])
}

/// Groups each noun with the contiguous noun dependents on its left that
/// attach to it (directly or through an already absorbed word) by
/// `compound`, `flat` or `nmod`. Heads are visited right to left so the
/// rightmost noun of a run becomes the head, and no token joins two phrases.
pub fn chunk_noun_phrases(sentence: &ParsedSentence) -> Vec<NounPhrase> {
    let nouns = noun_tags();
    let n = sentence.tokens.len();
    let mut taken = vec![false; n + 1];
    let mut phrases = Vec::new();

    for head in (1..=n).rev() {
        if taken[head] || !pos_matches(&sentence.tokens[head - 1], &nouns) {
            continue;
        }
        let mut start = head;
        while start > 1 {
            let cand = &sentence.tokens[start - 2];
            let absorbs = !taken[cand.index]
                && pos_matches(cand, &nouns)
                && ABSORB_RELATIONS.contains(&cand.deprel.as_str())
                && (start..=head).contains(&cand.head);
            if !absorbs {
                break;
            }
            start -= 1;
        }
        taken[start..=head].fill(true);
        phrases.push(NounPhrase::from_tokens(sentence, head, start, head));
    }
    phrases.reverse();
    phrases
}
