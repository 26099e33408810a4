use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use absa_core::corpus::{
    attach_parses, parse_conllu, parse_semeval_xml, read_jsonl, write_jsonl, AnnotatedSentence,
    AttachOptions,
};
use serde::Serialize;

use crate::{CliError, InputArgs, InputFormat};

pub fn require_file(path: &Path, what: &str) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::Io(format!("{what} not found: {}", path.display())))
    }
}

pub fn require_files(paths: &[(Option<&PathBuf>, &str)]) -> Result<(), CliError> {
    for (path, what) in paths {
        if let Some(p) = path {
            require_file(p, what)?;
        }
    }
    Ok(())
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn detect_format(path: &Path) -> Option<InputFormat> {
    match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
        "conllu" | "conll" => Some(InputFormat::Conllu),
        "xml" => Some(InputFormat::Semeval),
        "jsonl" | "json" => Some(InputFormat::Jsonl),
        _ => None,
    }
}

fn read_format(path: &Path, format: InputFormat) -> Result<Vec<AnnotatedSentence>, CliError> {
    let reader = open(path)?;
    let corpus = match format {
        InputFormat::Conllu => parse_conllu(reader)?
            .into_iter()
            .map(AnnotatedSentence::new)
            .collect(),
        InputFormat::Semeval => parse_semeval_xml(reader)?,
        InputFormat::Jsonl => read_jsonl(reader)?,
    };
    Ok(corpus)
}

/// Reads the `--input` corpus and joins `--parses` onto it when given.
pub fn load_input(args: &InputArgs) -> Result<Vec<AnnotatedSentence>, CliError> {
    require_files(&[(Some(&args.input), "input"), (args.parses.as_ref(), "parses")])?;
    let format = match args.format.or_else(|| detect_format(&args.input)) {
        Some(f) => f,
        None => {
            return Err(CliError::invalid(format!(
                "cannot infer the format of {}; pass --format",
                args.input.display()
            )))
        }
    };
    let what = args.input.display().to_string();
    let corpus = read_format(&args.input, format).map_err(|e| e.context(&what))?;
    match &args.parses {
        None => Ok(corpus),
        Some(p) => {
            if format == InputFormat::Conllu {
                return Err(CliError::invalid("--parses cannot be combined with a CoNLL-U input"));
            }
            let parses = parse_conllu(open(p)?).map_err(|e| CliError::from(e).context(&p.display().to_string()))?;
            Ok(attach_parses(corpus, parses, AttachOptions::default())?)
        }
    }
}

/// Gold data: SemEval XML for `.xml` files, JSONL otherwise.
pub fn load_gold(path: &Path) -> Result<Vec<AnnotatedSentence>, CliError> {
    require_file(path, "gold")?;
    let format = if detect_format(path) == Some(InputFormat::Semeval) {
        InputFormat::Semeval
    } else {
        InputFormat::Jsonl
    };
    read_format(path, format).map_err(|e| e.context(&path.display().to_string()))
}

pub fn create_out_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_corpus(path: &Path, corpus: &[AnnotatedSentence]) -> Result<(), CliError> {
    let mut out = create(path)?;
    write_jsonl(corpus, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

pub fn write_json_lines<T: Serialize>(path: &Path, items: &[T]) -> Result<(), CliError> {
    let mut out = create(path)?;
    for item in items {
        serde_json::to_writer(&mut out, item)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(create(path)?);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct RunConfig<'a, A: Serialize, E: Serialize> {
    command: &'a str,
    args: &'a A,
    resolved: E,
}

/// Echoes the parsed arguments plus any resolved settings to
/// `run_config.json` in the output directory.
pub fn write_run_config<A: Serialize, E: Serialize>(
    out_dir: &Path,
    command: &str,
    args: &A,
    resolved: E,
) -> Result<(), CliError> {
    write_json(
        &out_dir.join("run_config.json"),
        &RunConfig {
            command,
            args,
            resolved,
        },
    )
}
