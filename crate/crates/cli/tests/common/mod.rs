//! Deterministic synthetic corpus shared by the integration tests.
//!
//! Three sentence shapes:
//! * `The <aspect> was <adj>.` with one gold aspect,
//! * `The <a1> and the <a2> were <adj>.` with two gold aspects,
//! * `We <verb> the <noun>.` with no gold aspect; the object still satisfies
//!   the direct-relation rule, so dependency extraction over-generates here.
//!
//! The replay LLM answers exactly the gold terms for a random subset of the
//! opinionated sentences and `none` otherwise (precise, low recall).
//! Embeddings are a shared topic direction plus noise for opinionated
//! sentences and an unrelated direction plus noise for the rest.

#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use absa_core::corpus::{parse_conllu, write_jsonl_string, AnnotatedSentence, AspectAnnotation, ParsedSentence, Source};
use absa_core::providers::{write_replay, EmbeddingVector, ReplayRecord, Task};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ASPECTS: &[&str] = &[
    "food", "service", "staff", "pizza", "sushi", "waiter", "menu", "ambience", "decor", "pasta",
    "dessert", "wine", "music", "portion", "bartender",
];
const ADJECTIVES: &[&str] = &["great", "awful", "delicious", "slow", "friendly", "bland", "cozy", "rude"];
const VERBS: &[&str] = &["visited", "booked", "passed", "found", "called"];
const OBJECTS: &[&str] = &["museum", "street", "station", "office", "garage"];

pub const DIM: usize = 16;

type Row = (&'static str, &'static str, &'static str, usize, &'static str);

pub struct Synthetic {
    pub conllu: String,
    pub parsed: Vec<ParsedSentence>,
    pub gold: Vec<AnnotatedSentence>,
    pub replay: Vec<ReplayRecord>,
    pub embeddings: Vec<EmbeddingVector>,
}

pub struct SyntheticFiles {
    pub corpus: PathBuf,
    pub gold: PathBuf,
    pub replay: PathBuf,
    pub embeddings: PathBuf,
}

fn block(id: &str, rows: &[Row]) -> String {
    let mut text = String::new();
    for (i, (form, ..)) in rows.iter().enumerate() {
        if i > 0 && !matches!(*form, "." | ",") {
            text.push(' ');
        }
        text.push_str(form);
    }
    let mut out = format!("# sent_id = {id}\n# text = {text}\n");
    for (i, (form, upos, xpos, head, rel)) in rows.iter().enumerate() {
        out.push_str(&format!("{}\t{form}\t_\t{upos}\t{xpos}\t_\t{head}\t{rel}\t_\t_\n", i + 1));
    }
    out.push('\n');
    out
}

fn noisy(rng: &mut ChaCha8Rng, base: &[f64], scale: f64) -> Vec<f64> {
    base.iter().map(|b| b + rng.gen_range(-scale..scale)).collect()
}

pub fn synthetic_corpus(n: usize, seed: u64) -> Synthetic {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut topic = vec![0.0; DIM];
    topic[0] = 1.0;
    topic[1] = 0.5;
    let mut other = vec![0.0; DIM];
    other[DIM - 1] = 1.0;
    other[DIM - 2] = 0.5;

    let mut conllu = String::new();
    // (gold terms, opinionated)
    let mut shapes: Vec<(Vec<&str>, bool)> = Vec::with_capacity(n);
    for i in 0..n {
        let id = format!("syn-{i:03}");
        let roll: f64 = rng.gen();
        if roll < 0.4 {
            let a = *ASPECTS.choose(&mut rng).unwrap();
            let adj = *ADJECTIVES.choose(&mut rng).unwrap();
            conllu.push_str(&block(
                &id,
                &[
                    ("The", "DET", "DT", 2, "det"),
                    (a, "NOUN", "NN", 4, "nsubj"),
                    ("was", "AUX", "VBD", 4, "cop"),
                    (adj, "ADJ", "JJ", 0, "root"),
                    (".", "PUNCT", ".", 4, "punct"),
                ],
            ));
            shapes.push((vec![a], true));
        } else if roll < 0.7 {
            let pair: Vec<&str> = ASPECTS.choose_multiple(&mut rng, 2).copied().collect();
            let adj = *ADJECTIVES.choose(&mut rng).unwrap();
            conllu.push_str(&block(
                &id,
                &[
                    ("The", "DET", "DT", 2, "det"),
                    (pair[0], "NOUN", "NN", 7, "nsubj"),
                    ("and", "CCONJ", "CC", 5, "cc"),
                    ("the", "DET", "DT", 5, "det"),
                    (pair[1], "NOUN", "NN", 2, "conj"),
                    ("were", "AUX", "VBD", 7, "cop"),
                    (adj, "ADJ", "JJ", 0, "root"),
                    (".", "PUNCT", ".", 7, "punct"),
                ],
            ));
            shapes.push((pair, true));
        } else {
            let v = *VERBS.choose(&mut rng).unwrap();
            let o = *OBJECTS.choose(&mut rng).unwrap();
            conllu.push_str(&block(
                &id,
                &[
                    ("We", "PRON", "PRP", 2, "nsubj"),
                    (v, "VERB", "VBD", 0, "root"),
                    ("the", "DET", "DT", 4, "det"),
                    (o, "NOUN", "NN", 2, "obj"),
                    (".", "PUNCT", ".", 2, "punct"),
                ],
            ));
            shapes.push((Vec::new(), false));
        }
    }

    let parsed = parse_conllu(conllu.as_bytes()).expect("synthetic CoNLL-U parses");
    let mut gold = Vec::with_capacity(n);
    let mut replay = Vec::with_capacity(n);
    let mut embeddings = Vec::with_capacity(n);
    for (sentence, (terms, opinionated)) in parsed.iter().zip(&shapes) {
        let mut annotated = AnnotatedSentence::new(sentence.clone());
        for term in terms {
            let tok = sentence.tokens.iter().find(|t| t.form == *term).unwrap();
            annotated.annotations.push(AspectAnnotation {
                term: term.to_string(),
                char_start: tok.char_start,
                char_end: tok.char_end,
                polarity: None,
                source: Source::Gold,
            });
        }
        let answered = *opinionated && rng.gen_bool(0.45);
        replay.push(ReplayRecord {
            id: sentence.id.clone(),
            task: Task::Ate,
            term: None,
            completion: if answered { terms.join(", ") } else { "none".into() },
        });
        let base = if *opinionated { &topic } else { &other };
        embeddings.push(EmbeddingVector {
            sentence_id: sentence.id.clone(),
            values: noisy(&mut rng, base, 0.35),
        });
        gold.push(annotated);
    }
    Synthetic {
        conllu,
        parsed,
        gold,
        replay,
        embeddings,
    }
}

impl Synthetic {
    pub fn write_to(&self, dir: &Path) -> SyntheticFiles {
        let files = SyntheticFiles {
            corpus: dir.join("corpus.conllu"),
            gold: dir.join("gold.jsonl"),
            replay: dir.join("replay.jsonl"),
            embeddings: dir.join("embeddings.jsonl"),
        };
        fs::write(&files.corpus, &self.conllu).unwrap();
        fs::write(&files.gold, write_jsonl_string(&self.gold)).unwrap();
        let mut buf = Vec::new();
        write_replay(&self.replay, &mut buf).unwrap();
        fs::write(&files.replay, buf).unwrap();
        let lines: String = self
            .embeddings
            .iter()
            .map(|v| serde_json::to_string(v).unwrap() + "\n")
            .collect();
        fs::write(&files.embeddings, lines).unwrap();
        files
    }
}

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}
