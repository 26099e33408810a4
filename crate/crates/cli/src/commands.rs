use absa_core::corpus::{AnnotatedSentence, ParsedSentence};
use absa_core::deprules::{DependencyExtractor, Lexicons, RuleConfig};
use absa_core::eval::{cf_grid, evaluate_asc, evaluate_ate, sweep_cf as run_sweep, SweepRow};
use absa_core::hybrid::{prepare, HybridConfig, Prepared};
use absa_core::providers::{
    annotate_asc, annotate_ate, export_training_pairs, CompletionBackend, EmbeddingBackend,
    EmbeddingCache, ReplayBackend, Task, WireClient,
};
use serde::Serialize;
use serde_json::json;

use crate::io::{
    create_out_dir, load_gold, load_input, require_file, require_files, write_corpus, write_csv,
    write_json, write_json_lines, write_run_config,
};
use crate::{
    CliError, DepArgs, EvaluateArgs, ExportArgs, HybridArgs, HybridRunArgs, LlmArgs, ProviderArgs,
    ProviderKind, RuleArgs, SweepArgs, TaskArg,
};

enum Backend {
    Replay(ReplayBackend),
    Wire(WireClient),
}

impl Backend {
    fn open(args: &ProviderArgs) -> Result<Self, CliError> {
        match args.provider {
            ProviderKind::Replay => {
                let path = args
                    .replay_file
                    .as_ref()
                    .ok_or_else(|| CliError::invalid("--provider replay requires --replay-file"))?;
                require_file(path, "replay file")?;
                Ok(Backend::Replay(ReplayBackend::load(path)?))
            }
            ProviderKind::Wire => Ok(Backend::Wire(WireClient::new(args.config())?)),
        }
    }

    fn completion(&self) -> &dyn CompletionBackend {
        match self {
            Backend::Replay(b) => b,
            Backend::Wire(b) => b,
        }
    }

    /// Replay runs read sentence vectors from the embedding cache only.
    fn embedder(&self) -> Option<&dyn EmbeddingBackend> {
        match self {
            Backend::Replay(_) => None,
            Backend::Wire(b) => Some(b),
        }
    }
}

fn extractor(args: &RuleArgs) -> Result<DependencyExtractor, CliError> {
    require_files(&[
        (args.lexicon_pos.as_ref(), "positive lexicon"),
        (args.lexicon_neg.as_ref(), "negative lexicon"),
        (args.stopwords.as_ref(), "stopword list"),
        (args.rules.as_ref(), "rule config"),
    ])?;
    let config = match &args.rules {
        Some(p) => RuleConfig::load(p)?,
        None => RuleConfig::default(),
    };
    let lexicons = Lexicons::load(
        args.stopwords.as_deref(),
        args.lexicon_pos.as_deref(),
        args.lexicon_neg.as_deref(),
    )?;
    Ok(DependencyExtractor::new(config, lexicons))
}

fn require_parsed(corpus: &[AnnotatedSentence]) -> Result<(), CliError> {
    let unparsed: Vec<&str> = corpus
        .iter()
        .filter(|s| !s.sentence.is_parsed())
        .map(|s| s.id())
        .collect();
    if unparsed.is_empty() {
        Ok(())
    } else {
        Err(CliError::invalid(format!(
            "sentences without a dependency parse (pass --parses): {}",
            unparsed.join(", ")
        )))
    }
}

fn sentences(corpus: Vec<AnnotatedSentence>) -> Vec<ParsedSentence> {
    corpus.into_iter().map(|s| s.sentence).collect()
}

pub fn annotate_dep(args: &DepArgs) -> Result<(), CliError> {
    let extractor = extractor(&args.rules)?;
    let corpus = load_input(&args.input)?;
    require_parsed(&corpus)?;
    create_out_dir(&args.out)?;
    write_run_config(&args.out, "annotate-dep", args, json!({ "rules": extractor.config }))?;
    let annotated: Vec<AnnotatedSentence> = sentences(corpus)
        .into_iter()
        .map(|s| {
            let annotations = extractor.extract(&s);
            AnnotatedSentence {
                sentence: s,
                annotations,
                split: None,
            }
        })
        .collect();
    write_corpus(&args.out.join("corpus.jsonl"), &annotated)
}

pub fn annotate_llm(args: &LlmArgs) -> Result<(), CliError> {
    let corpus = load_input(&args.input)?;
    let backend = Backend::open(&args.provider)?;
    let config = args.provider.config();
    create_out_dir(&args.out)?;
    write_run_config(&args.out, "annotate-llm", args, json!({ "provider": config }))?;
    let (annotated, rejects) = match args.task {
        TaskArg::Ate => {
            let out = annotate_ate(&sentences(corpus), backend.completion(), &config)?;
            (out.corpus, out.rejects)
        }
        TaskArg::Asc => {
            let out = annotate_asc(corpus, backend.completion(), &config)?;
            (out.corpus, out.rejects)
        }
    };
    write_corpus(&args.out.join("corpus.jsonl"), &annotated)?;
    write_json_lines(&args.out.join("rejects.jsonl"), &rejects)
}

fn prepare_run(run: &HybridRunArgs) -> Result<Prepared, CliError> {
    let extractor = extractor(&run.rules)?;
    let corpus = load_input(&run.input)?;
    require_parsed(&corpus)?;
    let backend = Backend::open(&run.provider)?;
    let mut cache = match &run.embed_cache {
        Some(p) => EmbeddingCache::load(p)?,
        None => EmbeddingCache::in_memory(),
    };
    Ok(prepare(
        &sentences(corpus),
        backend.completion(),
        backend.embedder(),
        &mut cache,
        &run.provider.config(),
        &extractor,
    )?)
}

fn resolved(run: &HybridRunArgs) -> serde_json::Value {
    json!({ "provider": run.provider.config() })
}

pub fn annotate_hybrid(args: &HybridArgs) -> Result<(), CliError> {
    let prepared = prepare_run(&args.run)?;
    let config = HybridConfig {
        cf: args.cf,
        sigma_mode: args.run.sigma.into(),
    };
    let out = prepared.apply(&config)?;
    create_out_dir(&args.out)?;
    let mut resolved = resolved(&args.run);
    resolved["hybrid"] = json!(config);
    write_run_config(&args.out, "annotate-hybrid", args, resolved)?;
    write_corpus(&args.out.join("corpus.jsonl"), &out.corpus)?;
    write_json(&args.out.join("report.json"), &out.report)?;
    write_json_lines(&args.out.join("rejects.jsonl"), &out.rejects)
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let number = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| CliError::invalid(format!("bad number {s:?} in --cf-grid")))
    };
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::invalid("--cf-grid range must be start:end:step"));
        }
        Ok(cf_grid(number(parts[0])?, number(parts[1])?, number(parts[2])?)?)
    } else {
        spec.split(',').map(number).collect()
    }
}

#[derive(Serialize)]
struct SweepTable {
    cf: Vec<f64>,
    s_size: Vec<usize>,
    precision: Vec<f64>,
    recall: Vec<f64>,
    f1: Vec<f64>,
}

impl SweepTable {
    fn new(rows: &[SweepRow]) -> Self {
        SweepTable {
            cf: rows.iter().map(|r| r.cf).collect(),
            s_size: rows.iter().map(|r| r.s_size).collect(),
            precision: rows.iter().map(|r| r.precision).collect(),
            recall: rows.iter().map(|r| r.recall).collect(),
            f1: rows.iter().map(|r| r.f1).collect(),
        }
    }
}

pub fn sweep_cf(args: &SweepArgs) -> Result<(), CliError> {
    let grid = parse_grid(&args.cf_grid)?;
    let gold = load_gold(&args.gold)?;
    let prepared = prepare_run(&args.run)?;
    let points = run_sweep(&prepared, &gold, &grid, args.run.sigma.into(), args.match_mode.into())?;
    create_out_dir(&args.out)?;
    let reports = args.out.join("reports");
    create_out_dir(&reports)?;
    let mut resolved = resolved(&args.run);
    resolved["cf_grid"] = json!(grid);
    write_run_config(&args.out, "sweep-cf", args, resolved)?;
    let rows: Vec<SweepRow> = points.iter().map(|p| p.row).collect();
    write_csv(&args.out.join("sweep.csv"), &rows)?;
    write_json(&args.out.join("sweep.json"), &SweepTable::new(&rows))?;
    for p in &points {
        write_json(&reports.join(format!("cf_{}.json", p.row.cf)), &p.report)?;
    }
    Ok(())
}

pub fn evaluate(args: &EvaluateArgs) -> Result<(), CliError> {
    require_file(&args.input, "predictions")?;
    let predicted = load_gold(&args.input)?;
    let gold = load_gold(&args.gold)?;
    create_out_dir(&args.out)?;
    write_run_config(&args.out, "evaluate", args, json!({}))?;
    match args.task {
        TaskArg::Ate => {
            let report = evaluate_ate(&predicted, &gold, args.match_mode.into())?;
            write_json(&args.out.join("ate_report.json"), &report)
        }
        TaskArg::Asc => {
            let report = evaluate_asc(&predicted, &gold)?;
            write_json(&args.out.join("asc_report.json"), &report)
        }
    }
}

#[derive(Serialize)]
struct ExportSummary {
    task: Task,
    pairs: usize,
    skipped_absent: usize,
    skipped_conflict: usize,
}

pub fn export_training(args: &ExportArgs) -> Result<(), CliError> {
    let corpus = load_input(&args.input)?;
    let task: Task = args.task.into();
    let out = export_training_pairs(&corpus, task, &args.eos);
    create_out_dir(&args.out)?;
    write_run_config(&args.out, "export-training", args, json!({}))?;
    write_json_lines(&args.out.join(format!("train_{task}.jsonl")), &out.pairs)?;
    write_json(
        &args.out.join("export_summary.json"),
        &ExportSummary {
            task,
            pairs: out.pairs.len(),
            skipped_absent: out.skipped_absent,
            skipped_conflict: out.skipped_conflict,
        },
    )
}
