mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::fixture;
use serde_json::Value;
use tempfile::TempDir;

fn absa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_absa"))
        .args(args)
        .env_remove("ABSA_API_KEY")
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_json(p: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

// Copies the hybrid6 fixture into a scratch directory so runs never touch
// the checked-in cache.
fn hybrid6(dir: &Path) -> [PathBuf; 4] {
    let names = ["corpus.conllu", "replay.jsonl", "embeddings.jsonl", "gold.jsonl"];
    names.map(|n| {
        let to = dir.join(n);
        fs::copy(fixture("hybrid6").join(n), &to).unwrap();
        to
    })
}

fn hybrid_args(files: &[PathBuf; 4]) -> Vec<&str> {
    vec![
        "--input",
        path(&files[0]),
        "--replay-file",
        path(&files[1]),
        "--embed-cache",
        path(&files[2]),
    ]
}

const PRED_JSONL: &str = r#"{"id": "a", "text": "The Food and the wine wine.", "split": null, "tokens": null, "aspect_terms": [{"term": "Food", "from": 4, "to": 8, "polarity": "positive", "source": "llm"}, {"term": "wine", "from": 17, "to": 21, "polarity": "negative", "source": "llm"}]}
"#;

const GOLD_JSONL: &str = r#"{"id": "a", "text": "The Food and the wine wine.", "split": null, "tokens": null, "aspect_terms": [{"term": "Food", "from": 4, "to": 8, "polarity": "positive", "source": "gold"}, {"term": "wine", "from": 22, "to": 26, "polarity": null, "source": "gold"}]}
"#;

#[test]
fn missing_lexicon_is_an_io_error_naming_the_path() {
    let tmp = TempDir::new().unwrap();
    let missing = tmp.path().join("nope/pos.txt");
    let out = absa(&[
        "annotate-dep",
        "--input",
        path(&fixture("liked_service_staff.conllu")),
        "--lexicon-pos",
        path(&missing),
        "--out",
        path(&tmp.path().join("out")),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("nope/pos.txt"), "{}", stderr(&out));
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn replay_miss_is_a_validation_error_listing_ids() {
    let tmp = TempDir::new().unwrap();
    let replay = tmp.path().join("replay.jsonl");
    fs::write(&replay, "").unwrap();
    let out = absa(&[
        "annotate-llm",
        "--input",
        path(&fixture("hybrid6/corpus.conllu")),
        "--replay-file",
        path(&replay),
        "--out",
        path(&tmp.path().join("out")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("h1") && err.contains("h6"), "{err}");
}

#[test]
fn evaluate_rejects_mismatched_ids() {
    let tmp = TempDir::new().unwrap();
    let pred = tmp.path().join("pred.jsonl");
    let gold = tmp.path().join("gold.jsonl");
    fs::write(&pred, PRED_JSONL.replace("\"id\": \"a\"", "\"id\": \"b\"")).unwrap();
    fs::write(&gold, GOLD_JSONL).unwrap();
    let out = absa(&[
        "evaluate",
        "--input",
        path(&pred),
        "--gold",
        path(&gold),
        "--out",
        path(&tmp.path().join("out")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("missing from predictions [a]"), "{}", stderr(&out));
}

#[test]
fn empty_input_gives_empty_output() {
    let tmp = TempDir::new().unwrap();
    let input = tmp.path().join("empty.conllu");
    fs::write(&input, "").unwrap();
    let out_dir = tmp.path().join("out");
    let out = absa(&["annotate-dep", "--input", path(&input), "--out", path(&out_dir)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(fs::read_to_string(out_dir.join("corpus.jsonl")).unwrap(), "");
    assert!(out_dir.join("run_config.json").exists());
}

#[test]
fn export_training_uses_none_and_custom_eos() {
    let tmp = TempDir::new().unwrap();
    let gold = hybrid6(tmp.path())[3].clone();
    let out_dir = tmp.path().join("out");
    let out = absa(&[
        "export-training",
        "--input",
        path(&gold),
        "--eos",
        " <eos>",
        "--out",
        path(&out_dir),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let lines: Vec<Value> = fs::read_to_string(out_dir.join("train_ate.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[1]["output"], "staff, decor <eos>");
    assert_eq!(lines[2]["output"], "none <eos>");
    assert!(lines[0]["input"].as_str().unwrap().ends_with("The food was great. <eos>"));
    let summary = read_json(out_dir.join("export_summary.json"));
    assert_eq!(summary["pairs"], 6);
}

#[test]
fn single_point_sweep_matches_hybrid_plus_evaluate() {
    let tmp = TempDir::new().unwrap();
    let files = hybrid6(tmp.path());
    let sweep_dir = tmp.path().join("sweep");
    let mut args = vec!["sweep-cf"];
    args.extend(hybrid_args(&files));
    args.extend(["--gold", path(&files[3]), "--cf-grid", "0.5", "--out", path(&sweep_dir)]);
    let out = absa(&args);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    let run_dir = tmp.path().join("run");
    let mut args = vec!["annotate-hybrid"];
    args.extend(hybrid_args(&files));
    args.extend(["--cf", "0.5", "--out", path(&run_dir)]);
    assert_eq!(absa(&args).status.code(), Some(0));

    let eval_dir = tmp.path().join("eval");
    let out = absa(&[
        "evaluate",
        "--input",
        path(&run_dir.join("corpus.jsonl")),
        "--gold",
        path(&files[3]),
        "--out",
        path(&eval_dir),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    let eval = read_json(eval_dir.join("ate_report.json"));
    let report = read_json(run_dir.join("report.json"));
    assert_eq!(read_json(sweep_dir.join("reports/cf_0.5.json")), report);
    let table = read_json(sweep_dir.join("sweep.json"));
    assert_eq!(table["s_size"][0], report["s"]);
    for key in ["precision", "recall", "f1"] {
        assert_eq!(table[key][0], eval[key]);
    }
    for dir in [&sweep_dir, &run_dir, &eval_dir] {
        assert!(dir.join("run_config.json").exists());
    }
    let config = read_json(run_dir.join("run_config.json"));
    assert_eq!(config["command"], "annotate-hybrid");
    assert_eq!(config["resolved"]["hybrid"]["cf"], 0.5);
}

#[test]
fn sweep_csv_header_and_recall_trend() {
    let tmp = TempDir::new().unwrap();
    let files = hybrid6(tmp.path());
    let sweep_dir = tmp.path().join("sweep");
    let mut args = vec!["sweep-cf"];
    args.extend(hybrid_args(&files));
    args.extend(["--gold", path(&files[3]), "--cf-grid", "-10:10:0.5", "--out", path(&sweep_dir)]);
    let out = absa(&args);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    let csv = fs::read_to_string(sweep_dir.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("cf,s_size,precision,recall,f1"));
    assert_eq!(csv.lines().count(), 42);
    let table = read_json(sweep_dir.join("sweep.json"));
    let recall: Vec<f64> = table["recall"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert!(recall.windows(2).all(|w| w[1] <= w[0]), "{recall:?}");
    assert!(recall[0] > *recall.last().unwrap());
}

#[test]
fn annotate_llm_is_reproducible() {
    let tmp = TempDir::new().unwrap();
    let files = hybrid6(tmp.path());
    let run = |name: &str| {
        let dir = tmp.path().join(name);
        let out = absa(&[
            "annotate-llm",
            "--input",
            path(&files[0]),
            "--replay-file",
            path(&files[1]),
            "--out",
            path(&dir),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        fs::read(dir.join("corpus.jsonl")).unwrap()
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn match_mode_flag_changes_scores() {
    let tmp = TempDir::new().unwrap();
    let pred = tmp.path().join("pred.jsonl");
    let gold = tmp.path().join("gold.jsonl");
    fs::write(&pred, PRED_JSONL).unwrap();
    fs::write(&gold, GOLD_JSONL).unwrap();
    let f1 = |mode: &str| {
        let dir = tmp.path().join(mode);
        let out = absa(&[
            "evaluate",
            "--input",
            path(&pred),
            "--gold",
            path(&gold),
            "--match-mode",
            mode,
            "--out",
            path(&dir),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        read_json(dir.join("ate_report.json"))["f1"].as_f64().unwrap()
    };
    // The first "wine" matches the gold one only by string.
    assert_eq!(f1("span"), 0.5);
    assert_eq!(f1("string"), 1.0);
}

#[test]
fn asc_evaluation_counts_absent_predictions() {
    let tmp = TempDir::new().unwrap();
    let pred = tmp.path().join("pred.jsonl");
    let gold = tmp.path().join("gold.jsonl");
    fs::write(&pred, PRED_JSONL.replace("\"from\": 17, \"to\": 21", "\"from\": 22, \"to\": 26")).unwrap();
    fs::write(&gold, GOLD_JSONL.replace("\"polarity\": null", "\"polarity\": \"negative\"")).unwrap();
    let dir = tmp.path().join("out");
    let out = absa(&[
        "evaluate",
        "--task",
        "asc",
        "--input",
        path(&pred),
        "--gold",
        path(&gold),
        "--out",
        path(&dir),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report = read_json(dir.join("asc_report.json"));
    assert_eq!(report["confusion"][0][0], 1);
    assert_eq!(report["confusion"][1][1], 1);
    assert_eq!(report["macro_f1"], 2.0 / 3.0);
}
