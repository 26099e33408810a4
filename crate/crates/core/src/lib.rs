//! Aspect term extraction and sentiment annotation: dependency rules, LLM
//! providers, their similarity-gated combination, and scoring.

pub mod corpus;
pub mod deprules;
pub mod providers;
pub mod hybrid;
pub mod eval;
