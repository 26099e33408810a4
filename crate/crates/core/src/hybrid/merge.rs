use crate::corpus::{AnnotatedSentence, AspectAnnotation};

#[derive(Debug, Clone, PartialEq)]
pub struct MergeOutcome {
    pub sentence: AnnotatedSentence,
    pub added: usize,
    pub dropped_overlap: usize,
}

/// Adds each dependency term whose span shares no character with an existing
/// annotation. Existing annotations are kept unchanged; the result is ordered
/// by offset with duplicate spans collapsed.
pub fn merge_annotations(sentence: &AnnotatedSentence, dep_terms: &[AspectAnnotation]) -> MergeOutcome {
    let mut merged = sentence.clone();
    let mut added = 0;
    let mut dropped_overlap = 0;
    for dep in dep_terms {
        if sentence.annotations.iter().any(|a| a.overlaps(dep)) {
            dropped_overlap += 1;
        } else if !merged.annotations.iter().any(|a| a.span() == dep.span()) {
            merged.annotations.push(dep.clone());
            added += 1;
        }
    }
    merged.annotations.sort_by_key(|a| (a.char_start, a.char_end));
    MergeOutcome {
        sentence: merged,
        added,
        dropped_overlap,
    }
}
