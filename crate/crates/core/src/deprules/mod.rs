//! Rule-based aspect-term extraction over dependency parses.
//!
//! Noun-phrase candidates are chunked from the parse, pruned against stopword
//! and opinion lexicons, and kept when their head is linked to an opinion
//! word by one of three relation patterns:
//!
//! * `AT -DEP- O`: a direct edge to an opinion word,
//! * `AT -DEP1- M -DEP2- O`: a two-hop path through a bridge word,
//! * `AT1 -DEP3- AT2`: a conjunction with an already accepted aspect.
//!
//! Edges are matched in either direction.

mod chunk;
mod lexicon;
mod rules;

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{AspectAnnotation, ParsedSentence, Token};

pub use chunk::{chunk_noun_phrases, NounPhrase};
pub use lexicon::Lexicons;
pub use rules::{extract_aspect_terms, prune_candidates};

#[derive(Debug, Error)]
pub enum DeprulesError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("rule config {path}: {message}")]
    Config { path: String, message: String },
}

/// Relation and POS sets used by the three rule families.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleConfig {
    pub dep_set: BTreeSet<String>,
    pub dep1_set: BTreeSet<String>,
    pub dep2_set: BTreeSet<String>,
    pub dep3_set: BTreeSet<String>,
    pub opinion_pos: BTreeSet<String>,
    pub bridge_pos: BTreeSet<String>,
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

impl Default for RuleConfig {
    fn default() -> Self {
        RuleConfig {
            dep_set: set(&["amod", "nsubj", "xcomp", "obl", "obj", "nmod", "dep"]),
            dep1_set: set(&["amod", "nsubj", "nmod"]),
            dep2_set: set(&["amod", "nsubj", "xcomp", "advmod", "nmod"]),
            dep3_set: set(&["conj"]),
            opinion_pos: set(&["JJ", "VB", "RB"]),
            bridge_pos: set(&["NN", "VB", "RB"]),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleConfigFile {
    dep_set: Option<Vec<String>>,
    dep1_set: Option<Vec<String>>,
    dep2_set: Option<Vec<String>>,
    dep3_set: Option<Vec<String>>,
    opinion_pos: Option<Vec<String>>,
    bridge_pos: Option<Vec<String>>,
}

impl RuleConfig {
    /// Parses a TOML override. Keys are set names, values are string lists;
    /// omitted keys keep their defaults. Relation names are normalized the
    /// same way parses are.
    pub fn from_toml(source: &str, path: &str) -> Result<Self, DeprulesError> {
        let file: RuleConfigFile = toml::from_str(source).map_err(|e| DeprulesError::Config {
            path: path.to_string(),
            message: e.to_string(),
        })?;
        let rels = |v: Vec<String>| -> BTreeSet<String> {
            v.iter().map(|s| crate::corpus::normalize_deprel(s)).collect()
        };
        let tags = |v: Vec<String>| -> BTreeSet<String> { v.into_iter().collect() };
        let mut cfg = RuleConfig::default();
        if let Some(v) = file.dep_set {
            cfg.dep_set = rels(v);
        }
        if let Some(v) = file.dep1_set {
            cfg.dep1_set = rels(v);
        }
        if let Some(v) = file.dep2_set {
            cfg.dep2_set = rels(v);
        }
        if let Some(v) = file.dep3_set {
            cfg.dep3_set = rels(v);
        }
        if let Some(v) = file.opinion_pos {
            cfg.opinion_pos = tags(v);
        }
        if let Some(v) = file.bridge_pos {
            cfg.bridge_pos = tags(v);
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, DeprulesError> {
        let display = path.display().to_string();
        let source = std::fs::read_to_string(path).map_err(|source| DeprulesError::Io {
            path: display.clone(),
            source,
        })?;
        Self::from_toml(&source, &display)
    }
}

/// POS family check: XPOS prefix when present, else a UPOS mapping
/// (ADJ→JJ, VERB→VB, ADV→RB, NOUN/PROPN→NN).
pub fn pos_matches(token: &Token, prefixes: &BTreeSet<String>) -> bool {
    let tag = match &token.xpos {
        Some(x) => x.as_str(),
        None => match token.upos.as_str() {
            "ADJ" => "JJ",
            "VERB" => "VB",
            "ADV" => "RB",
            "NOUN" | "PROPN" => "NN",
            _ => return false,
        },
    };
    prefixes.iter().any(|p| tag.starts_with(p.as_str()))
}

/// Chunk, prune and apply the rule families in one call.
#[derive(Debug, Clone, Default)]
pub struct DependencyExtractor {
    pub config: RuleConfig,
    pub lexicons: Lexicons,
}

impl DependencyExtractor {
    pub fn new(config: RuleConfig, lexicons: Lexicons) -> Self {
        DependencyExtractor { config, lexicons }
    }

    pub fn extract(&self, sentence: &ParsedSentence) -> Vec<AspectAnnotation> {
        let candidates = chunk_noun_phrases(sentence);
        let pruned = prune_candidates(sentence, candidates, &self.lexicons);
        extract_aspect_terms(sentence, &pruned, &self.config, &self.lexicons)
    }
}
