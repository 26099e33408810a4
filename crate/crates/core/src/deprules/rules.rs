use std::collections::{BTreeSet, HashSet};

use super::chunk::NounPhrase;
use super::{pos_matches, Lexicons, RuleConfig};
use crate::corpus::{AspectAnnotation, ParsedSentence, Source, Token};

/// Drops phrases whose head is a stopword or opinion word, then trims such
/// words from both ends of the survivors.
pub fn prune_candidates(
    sentence: &ParsedSentence,
    candidates: Vec<NounPhrase>,
    lexicons: &Lexicons,
) -> Vec<NounPhrase> {
    let prunable = |index: usize| {
        let form = &sentence.tokens[index - 1].form;
        lexicons.is_stopword(form) || lexicons.is_opinion_word(form)
    };
    candidates
        .into_iter()
        .filter(|np| !prunable(np.head_index))
        .map(|np| {
            let mut start = np.start;
            let mut end = np.end;
            while start < np.head_index && prunable(start) {
                start += 1;
            }
            while end > np.head_index && prunable(end) {
                end -= 1;
            }
            if (start, end) == (np.start, np.end) {
                np
            } else {
                NounPhrase::from_tokens(sentence, np.head_index, start, end)
            }
        })
        .collect()
}

/// Tokens joined to `index` by an edge whose relation is in `relations`,
/// looking both down (dependents) and up (governor).
fn neighbours<'a>(
    sentence: &'a ParsedSentence,
    index: usize,
    relations: &'a BTreeSet<String>,
) -> impl Iterator<Item = &'a Token> + 'a {
    let tok = &sentence.tokens[index - 1];
    let up = (tok.head > 0 && relations.contains(&tok.deprel))
        .then(|| &sentence.tokens[tok.head - 1]);
    let down = sentence
        .tokens
        .iter()
        .filter(move |t| t.head == index && relations.contains(&t.deprel));
    up.into_iter().chain(down)
}

fn direct_opinion(
    sentence: &ParsedSentence,
    head: usize,
    config: &RuleConfig,
    lexicons: &Lexicons,
) -> bool {
    neighbours(sentence, head, &config.dep_set)
        .any(|o| pos_matches(o, &config.opinion_pos) && !lexicons.is_stopword(&o.form))
}

fn bridged_opinion(sentence: &ParsedSentence, head: usize, config: &RuleConfig) -> bool {
    neighbours(sentence, head, &config.dep1_set)
        .filter(|m| pos_matches(m, &config.bridge_pos))
        .any(|m| {
            neighbours(sentence, m.index, &config.dep2_set)
                .any(|o| o.index != head && pos_matches(o, &config.opinion_pos))
        })
}

/// Applies the three rule families to pruned candidates and returns the
/// accepted phrases as dependency-sourced annotations, ordered by offset.
pub fn extract_aspect_terms(
    sentence: &ParsedSentence,
    candidates: &[NounPhrase],
    config: &RuleConfig,
    lexicons: &Lexicons,
) -> Vec<AspectAnnotation> {
    if !sentence.is_parsed() || candidates.is_empty() {
        return Vec::new();
    }
    let mut accepted: Vec<bool> = candidates
        .iter()
        .map(|np| {
            direct_opinion(sentence, np.head_index, config, lexicons)
                || bridged_opinion(sentence, np.head_index, config)
        })
        .collect();

    // Conjunction closure: propagate acceptance along conj chains.
    loop {
        let accepted_heads: HashSet<usize> = candidates
            .iter()
            .zip(&accepted)
            .filter(|(_, &ok)| ok)
            .map(|(np, _)| np.head_index)
            .collect();
        let mut changed = false;
        for (np, ok) in candidates.iter().zip(accepted.iter_mut()) {
            if *ok {
                continue;
            }
            if neighbours(sentence, np.head_index, &config.dep3_set)
                .any(|t| accepted_heads.contains(&t.index))
            {
                *ok = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let mut seen = HashSet::new();
    let mut out: Vec<AspectAnnotation> = candidates
        .iter()
        .zip(&accepted)
        .filter(|(_, &ok)| ok)
        .filter(|(np, _)| seen.insert((np.char_start, np.char_end)))
        .map(|(np, _)| AspectAnnotation {
            term: np.text.clone(),
            char_start: np.char_start,
            char_end: np.char_end,
            polarity: None,
            source: Source::Dep,
        })
        .collect();
    out.sort_by_key(|a| (a.char_start, a.char_end));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_conllu;
    use crate::deprules::{chunk_noun_phrases, DependencyExtractor};

    fn conllu(text: &str, rows: &[(&str, &str, &str, usize, &str)]) -> ParsedSentence {
        let mut s = format!("# sent_id = t\n# text = {text}\n");
        for (i, (form, upos, xpos, head, rel)) in rows.iter().enumerate() {
            s.push_str(&format!(
                "{}\t{form}\t_\t{upos}\t{xpos}\t_\t{head}\t{rel}\t_\t_\n",
                i + 1
            ));
        }
        parse_conllu(s.as_bytes()).unwrap().remove(0)
    }

    fn terms(anns: &[AspectAnnotation]) -> Vec<&str> {
        anns.iter().map(|a| a.term.as_str()).collect()
    }

    /// "I liked the service and the staff, but not the food." with the
    /// elided "but not (I liked) the food" promoted as conj of the verb.
    fn liked_service_staff(food_head: usize) -> ParsedSentence {
        conllu(
            "I liked the service and the staff, but not the food.",
            &[
                ("I", "PRON", "PRP", 2, "nsubj"),
                ("liked", "VERB", "VBD", 0, "root"),
                ("the", "DET", "DT", 4, "det"),
                ("service", "NOUN", "NN", 2, "obj"),
                ("and", "CCONJ", "CC", 7, "cc"),
                ("the", "DET", "DT", 7, "det"),
                ("staff", "NOUN", "NN", 4, "conj"),
                (",", "PUNCT", ",", 12, "punct"),
                ("but", "CCONJ", "CC", 12, "cc"),
                ("not", "PART", "RB", 12, "advmod"),
                ("the", "DET", "DT", 12, "det"),
                ("food", "NOUN", "NN", food_head, "conj"),
                (".", "PUNCT", ".", 2, "punct"),
            ],
        )
    }

    #[test]
    fn service_by_direct_rule_staff_by_conjunction() {
        let s = liked_service_staff(2);
        let out = DependencyExtractor::default().extract(&s);
        assert_eq!(terms(&out), vec!["service", "staff"]);
        assert!(out.iter().all(|a| a.source == Source::Dep && a.polarity.is_none()));
        assert_eq!((out[0].char_start, out[0].char_end), (12, 19));
    }

    #[test]
    fn food_follows_when_conjoined_with_an_aspect() {
        let s = liked_service_staff(4);
        let out = DependencyExtractor::default().extract(&s);
        assert_eq!(terms(&out), vec!["service", "staff", "food"]);
    }

    #[test]
    fn two_hop_rule_through_verb() {
        let s = conllu(
            "The food tastes great.",
            &[
                ("The", "DET", "DT", 2, "det"),
                ("food", "NOUN", "NN", 3, "nsubj"),
                ("tastes", "VERB", "VBZ", 0, "root"),
                ("great", "ADJ", "JJ", 3, "xcomp"),
                (".", "PUNCT", ".", 3, "punct"),
            ],
        );
        let config = RuleConfig::default();
        let lex = Lexicons::default();
        let cands = prune_candidates(&s, chunk_noun_phrases(&s), &lex);
        // R1 alone would already fire through nsubj→tastes (VB); restrict
        // dep_set to isolate the two-hop path.
        let r2_only = RuleConfig {
            dep_set: BTreeSet::new(),
            ..config.clone()
        };
        assert_eq!(terms(&extract_aspect_terms(&s, &cands, &r2_only, &lex)), vec!["food"]);
        let none = RuleConfig {
            dep_set: BTreeSet::new(),
            dep2_set: BTreeSet::new(),
            ..config
        };
        assert!(extract_aspect_terms(&s, &cands, &none, &lex).is_empty());
    }

    #[test]
    fn pruning_removes_stopword_heads_and_trims_edges() {
        let s = conllu(
            "great food thing",
            &[
                ("great", "NOUN", "NN", 2, "compound"),
                ("food", "NOUN", "NN", 0, "root"),
                ("thing", "NOUN", "NN", 2, "dep"),
            ],
        );
        let lex = Lexicons::new(["thing"], ["great"]);
        let cands = chunk_noun_phrases(&s);
        assert_eq!(cands.iter().map(|c| c.text.as_str()).collect::<Vec<_>>(), vec!["great food", "thing"]);
        let pruned = prune_candidates(&s, cands, &lex);
        assert_eq!(pruned.len(), 1);
        assert_eq!(pruned[0].text, "food");
        assert_eq!((pruned[0].start, pruned[0].end), (2, 2));
        assert!(prune_candidates(&s, Vec::new(), &lex).is_empty());
    }

    #[test]
    fn no_candidates_no_terms() {
        let s = conllu("ran", &[("ran", "VERB", "VBD", 0, "root")]);
        assert!(extract_aspect_terms(&s, &[], &RuleConfig::default(), &Lexicons::default()).is_empty());
    }

    #[test]
    fn opinion_word_that_is_a_stopword_does_not_anchor() {
        // "very" is an RB linked by amod but also a stopword.
        let s = conllu(
            "very screen",
            &[("very", "ADV", "RB", 2, "amod"), ("screen", "NOUN", "NN", 0, "root")],
        );
        let out = DependencyExtractor::default().extract(&s);
        assert!(out.is_empty());
    }
}
