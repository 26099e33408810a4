//! Similarity-gated fusion of LLM and dependency-rule annotations.
//!
//! Sentences the LLM annotated form M; the rest form Q. Each sentence of Q is
//! scored by cosine similarity against the mean embedding of M, and those
//! scoring strictly above `mu_y + sigma_y * cf` (the set S) are extended with
//! dependency-rule terms along with M. The remainder R is left unlabelled.
//! Dependency terms never override an overlapping LLM term.

mod merge;
mod similarity;

use serde::Serialize;
use thiserror::Error;

use crate::corpus::{AnnotatedSentence, AspectAnnotation, CorpusError, CorpusSplit, ParsedSentence, SplitName};
use crate::deprules::DependencyExtractor;
use crate::providers::{
    annotate_ate, embed, CompletionBackend, EmbeddingBackend, EmbeddingCache, ProviderConfig,
    ProviderError, Reject,
};

pub use merge::{merge_annotations, MergeOutcome};
pub use similarity::{
    compute_cutoff, cosine_similarity, mean_std, mean_vector, select_similar_split, SigmaMode,
    SimilarityStats,
};

#[derive(Debug, Error)]
pub enum HybridError {
    #[error("{stage}: {source}")]
    Provider {
        stage: &'static str,
        #[source]
        source: ProviderError,
    },
    #[error("split check: {0}")]
    Partition(#[source] CorpusError),
    #[error("cosine similarity: sentence {id} has an all-zero embedding")]
    ZeroVector { id: String },
    #[error("dependency extraction: sentences without a parse: {}", .0.join(", "))]
    Unparsed(Vec<String>),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HybridConfig {
    pub cf: f64,
    pub sigma_mode: SigmaMode,
}

impl Default for HybridConfig {
    fn default() -> Self {
        HybridConfig {
            cf: 0.5,
            sigma_mode: SigmaMode::Population,
        }
    }
}

/// Split sizes and threshold statistics of one run. The similarity fields are
/// `None` when Q is empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub n: usize,
    pub m: usize,
    pub q: usize,
    pub s: usize,
    pub r: usize,
    pub mu_y: Option<f64>,
    pub sigma_y: Option<f64>,
    pub cf: f64,
    pub c_x: Option<f64>,
    pub llm_rejects: usize,
    pub dep_terms_added: usize,
    pub dep_terms_dropped_overlap: usize,
    pub sigma_mode: SigmaMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HybridOutput {
    /// Every sentence of N in input order, tagged M, S or R.
    pub corpus: Vec<AnnotatedSentence>,
    pub report: RunReport,
    pub stats: Option<SimilarityStats>,
    pub rejects: Vec<Reject>,
}

/// Sentences with at least one LLM annotation (M) and the rest (Q), each in
/// corpus order.
pub fn split_by_llm_annotations(corpus: &[AnnotatedSentence]) -> (Vec<String>, Vec<String>) {
    let mut m = Vec::new();
    let mut q = Vec::new();
    for s in corpus {
        if s.annotations_from(crate::corpus::Source::Llm).next().is_some() {
            m.push(s.id().to_string());
        } else {
            q.push(s.id().to_string());
        }
    }
    (m, q)
}

/// Everything in the pipeline that does not depend on `cf`: LLM annotations,
/// the M/Q split, similarity scores of Q and dependency terms for every
/// sentence. [`Prepared::apply`] finishes a run for one configuration.
#[derive(Debug, Clone)]
pub struct Prepared {
    llm_corpus: Vec<AnnotatedSentence>,
    rejects: Vec<Reject>,
    m_ids: Vec<String>,
    q_ids: Vec<String>,
    similarities: Vec<(String, f64)>,
    dep_terms: Vec<Vec<AspectAnnotation>>,
}

fn provider(stage: &'static str) -> impl Fn(ProviderError) -> HybridError {
    move |source| HybridError::Provider { stage, source }
}

/// Runs the LLM, embedding and dependency stages over N. Any annotations
/// already present on `corpus` are ignored.
pub fn prepare(
    corpus: &[ParsedSentence],
    llm: &dyn CompletionBackend,
    embedder: Option<&dyn EmbeddingBackend>,
    cache: &mut EmbeddingCache,
    provider_config: &ProviderConfig,
    extractor: &DependencyExtractor,
) -> Result<Prepared, HybridError> {
    let unparsed: Vec<String> = corpus
        .iter()
        .filter(|s| !s.is_parsed())
        .map(|s| s.id.clone())
        .collect();
    if !unparsed.is_empty() {
        return Err(HybridError::Unparsed(unparsed));
    }
    let mut seen = std::collections::HashSet::new();
    if let Some(dup) = corpus.iter().find(|s| !seen.insert(s.id.as_str())) {
        return Err(HybridError::Invalid(format!("duplicate sentence id {}", dup.id)));
    }

    let llm_out = annotate_ate(corpus, llm, provider_config).map_err(provider("llm annotation"))?;
    let (m_ids, q_ids) = split_by_llm_annotations(&llm_out.corpus);

    let vectors = embed(corpus, embedder, cache, provider_config).map_err(provider("embedding"))?;
    let in_m: std::collections::HashSet<&str> = m_ids.iter().map(String::as_str).collect();
    let (m_vecs, q_vecs): (Vec<_>, Vec<_>) = vectors
        .into_iter()
        .partition(|v| in_m.contains(v.sentence_id.as_str()));

    let mut similarities = Vec::with_capacity(q_vecs.len());
    if !q_vecs.is_empty() {
        let mu = mean_vector(&m_vecs)?;
        for v in &q_vecs {
            similarities.push((v.sentence_id.clone(), cosine_similarity(&v.sentence_id, &v.values, &mu)?));
        }
    }

    let dep_terms = corpus.iter().map(|s| extractor.extract(s)).collect();
    Ok(Prepared {
        llm_corpus: llm_out.corpus,
        rejects: llm_out.rejects,
        m_ids,
        q_ids,
        similarities,
        dep_terms,
    })
}

impl Prepared {
    pub fn m_ids(&self) -> &[String] {
        &self.m_ids
    }

    pub fn q_ids(&self) -> &[String] {
        &self.q_ids
    }

    /// The LLM-only corpus: N with LLM annotations and no dependency terms.
    pub fn llm_corpus(&self) -> &[AnnotatedSentence] {
        &self.llm_corpus
    }

    pub fn apply(&self, config: &HybridConfig) -> Result<HybridOutput, HybridError> {
        if !config.cf.is_finite() {
            return Err(HybridError::Invalid(format!("cf must be finite, got {}", config.cf)));
        }
        let (stats, s_ids, r_ids) = if self.similarities.is_empty() {
            (None, Vec::new(), Vec::new())
        } else {
            let stats = compute_cutoff(self.similarities.clone(), config.cf, config.sigma_mode)?;
            let (s, r) = select_similar_split(&stats);
            (Some(stats), s, r)
        };

        let n_split = CorpusSplit::new(
            SplitName::N,
            self.llm_corpus.iter().map(|s| s.id().to_string()).collect(),
        );
        let m_split = CorpusSplit::new(SplitName::M, self.m_ids.clone());
        let s_split = CorpusSplit::new(SplitName::S, s_ids);
        let r_split = CorpusSplit::new(SplitName::R, r_ids);
        n_split
            .verify_partition(&[&m_split, &s_split, &r_split])
            .map_err(HybridError::Partition)?;
        let s_set: std::collections::HashSet<&str> = s_split.ids.iter().map(String::as_str).collect();
        let m_set: std::collections::HashSet<&str> = m_split.ids.iter().map(String::as_str).collect();

        let mut corpus = Vec::with_capacity(self.llm_corpus.len());
        let mut added = 0;
        let mut dropped = 0;
        for (sentence, dep) in self.llm_corpus.iter().zip(&self.dep_terms) {
            let id = sentence.id();
            let split = if m_set.contains(id) {
                SplitName::M
            } else if s_set.contains(id) {
                SplitName::S
            } else {
                SplitName::R
            };
            let mut out = if split == SplitName::R {
                sentence.clone()
            } else {
                let merged = merge_annotations(sentence, dep);
                added += merged.added;
                dropped += merged.dropped_overlap;
                merged.sentence
            };
            out.split = Some(split);
            corpus.push(out);
        }

        let report = RunReport {
            n: n_split.len(),
            m: m_split.len(),
            q: self.q_ids.len(),
            s: s_split.len(),
            r: r_split.len(),
            mu_y: stats.as_ref().map(|s| s.mu_y),
            sigma_y: stats.as_ref().map(|s| s.sigma_y),
            cf: config.cf,
            c_x: stats.as_ref().map(|s| s.c_x),
            llm_rejects: self.rejects.len(),
            dep_terms_added: added,
            dep_terms_dropped_overlap: dropped,
            sigma_mode: config.sigma_mode,
        };
        Ok(HybridOutput {
            corpus,
            report,
            stats,
            rejects: self.rejects.clone(),
        })
    }
}

/// [`prepare`] followed by [`Prepared::apply`].
#[allow(clippy::too_many_arguments)]
pub fn hybrid_annotate(
    corpus: &[ParsedSentence],
    llm: &dyn CompletionBackend,
    embedder: Option<&dyn EmbeddingBackend>,
    cache: &mut EmbeddingCache,
    provider_config: &ProviderConfig,
    extractor: &DependencyExtractor,
    config: &HybridConfig,
) -> Result<HybridOutput, HybridError> {
    prepare(corpus, llm, embedder, cache, provider_config, extractor)?.apply(config)
}
