//! The `absa` command line: one subcommand per pipeline stage, coupled only
//! through JSONL files.

mod commands;
mod error;
mod io;

use std::path::PathBuf;

use absa_core::eval::MatchMode;
use absa_core::hybrid::SigmaMode;
use absa_core::providers::{ProviderConfig, Task, DEFAULT_API_BASE_ENV, DEFAULT_API_KEY_ENV};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "absa", version, about = "Weakly-supervised aspect-based sentiment data synthesis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract aspect terms with dependency rules.
    AnnotateDep(DepArgs),
    /// Annotate aspect terms or their sentiment with an LLM.
    AnnotateLlm(LlmArgs),
    /// Combine LLM and dependency annotations gated by sentence similarity.
    AnnotateHybrid(HybridArgs),
    /// Score predictions against gold data.
    Evaluate(EvaluateArgs),
    /// Run the hybrid method over a grid of cutoff fractions and score each run.
    SweepCf(SweepArgs),
    /// Write seq2seq training pairs.
    ExportTraining(ExportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Conllu,
    Semeval,
    Jsonl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProviderKind {
    Wire,
    Replay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskArg {
    Ate,
    Asc,
}

impl From<TaskArg> for Task {
    fn from(t: TaskArg) -> Self {
        match t {
            TaskArg::Ate => Task::Ate,
            TaskArg::Asc => Task::Asc,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SigmaArg {
    Population,
    Sample,
}

impl From<SigmaArg> for SigmaMode {
    fn from(s: SigmaArg) -> Self {
        match s {
            SigmaArg::Population => SigmaMode::Population,
            SigmaArg::Sample => SigmaMode::Sample,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchArg {
    Span,
    String,
}

impl From<MatchArg> for MatchMode {
    fn from(m: MatchArg) -> Self {
        match m {
            MatchArg::Span => MatchMode::Span,
            MatchArg::String => MatchMode::String,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct InputArgs {
    /// Corpus file.
    #[arg(long)]
    pub input: PathBuf,
    /// Corpus format; inferred from the extension when omitted
    /// (.conllu/.conll, .xml, .jsonl).
    #[arg(long, value_enum)]
    pub format: Option<InputFormat>,
    /// CoNLL-U parses joined onto a SemEval or JSONL corpus by sentence id.
    #[arg(long)]
    pub parses: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RuleArgs {
    #[arg(long)]
    pub lexicon_pos: Option<PathBuf>,
    #[arg(long)]
    pub lexicon_neg: Option<PathBuf>,
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// TOML file overriding the relation and POS sets.
    #[arg(long)]
    pub rules: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ProviderArgs {
    #[arg(long, value_enum, default_value = "replay")]
    pub provider: ProviderKind,
    /// Recorded completions (JSONL) for the replay provider.
    #[arg(long)]
    pub replay_file: Option<PathBuf>,
    /// Base URL of an OpenAI-compatible API.
    #[arg(long, env = DEFAULT_API_BASE_ENV, default_value = "http://localhost:8000/v1")]
    pub endpoint: String,
    #[arg(long, default_value = "flan-t5-base-ate")]
    pub model: String,
    #[arg(long, default_value = "all-MiniLM-L6-v2")]
    pub embedding_model: String,
    #[arg(long, default_value_t = 4)]
    pub max_in_flight: usize,
    #[arg(long, default_value_t = 60)]
    pub timeout_secs: u64,
    #[arg(long, default_value_t = 3)]
    pub retries: usize,
    #[arg(long, default_value_t = 32)]
    pub embed_batch_size: usize,
    /// End-of-sequence marker stripped from completions.
    #[arg(long, default_value = "</s>")]
    pub eos: String,
}

impl ProviderArgs {
    pub fn config(&self) -> ProviderConfig {
        ProviderConfig {
            endpoint: self.endpoint.clone(),
            model: self.model.clone(),
            embedding_model: self.embedding_model.clone(),
            api_key_env: DEFAULT_API_KEY_ENV.into(),
            max_in_flight: self.max_in_flight,
            timeout_secs: self.timeout_secs,
            retries: self.retries,
            embed_batch_size: self.embed_batch_size,
            eos_marker: self.eos.clone(),
            ..ProviderConfig::default()
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DepArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub rules: RuleArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LlmArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub provider: ProviderArgs,
    #[arg(long, value_enum, default_value = "ate")]
    pub task: TaskArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HybridRunArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub rules: RuleArgs,
    #[command(flatten)]
    pub provider: ProviderArgs,
    /// Sentence embedding cache (JSONL); created when absent.
    #[arg(long)]
    pub embed_cache: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "population")]
    pub sigma: SigmaArg,
    /// Reserved; the pipeline has no stochastic step.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HybridArgs {
    #[command(flatten)]
    pub run: HybridRunArgs,
    /// Cutoff fraction.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub cf: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    pub run: HybridRunArgs,
    /// Gold corpus (.xml for SemEval, otherwise JSONL).
    #[arg(long)]
    pub gold: PathBuf,
    /// `start:end:step` or a comma-separated list.
    #[arg(long, default_value = "-2:2:0.25", allow_hyphen_values = true)]
    pub cf_grid: String,
    #[arg(long, value_enum, default_value = "span")]
    pub match_mode: MatchArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvaluateArgs {
    /// Predicted corpus (JSONL).
    #[arg(long)]
    pub input: PathBuf,
    /// Gold corpus (.xml for SemEval, otherwise JSONL).
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long, value_enum, default_value = "ate")]
    pub task: TaskArg,
    #[arg(long, value_enum, default_value = "span")]
    pub match_mode: MatchArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExportArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value = "ate")]
    pub task: TaskArg,
    /// Appended to every input and output.
    #[arg(long, default_value = "</s>")]
    pub eos: String,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::AnnotateDep(a) => commands::annotate_dep(&a),
        Command::AnnotateLlm(a) => commands::annotate_llm(&a),
        Command::AnnotateHybrid(a) => commands::annotate_hybrid(&a),
        Command::Evaluate(a) => commands::evaluate(&a),
        Command::SweepCf(a) => commands::sweep_cf(&a),
        Command::ExportTraining(a) => commands::export_training(&a),
    }
}
