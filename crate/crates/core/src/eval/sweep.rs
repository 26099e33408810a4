use serde::Serialize;

use super::{evaluate_ate, EvalError, MatchMode};
use crate::corpus::AnnotatedSentence;
use crate::hybrid::{HybridConfig, Prepared, RunReport, SigmaMode};

pub const SWEEP_CSV_HEADER: [&str; 5] = ["cf", "s_size", "precision", "recall", "f1"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub cf: f64,
    pub s_size: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// One grid point: the scored row plus the run report behind it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub row: SweepRow,
    pub report: RunReport,
}

/// `start, start + step, ...` up to and including `end` (within 1e-9 of a
/// step). Points are computed by multiplication, not accumulation.
pub fn cf_grid(start: f64, end: f64, step: f64) -> Result<Vec<f64>, EvalError> {
    if !(start.is_finite() && end.is_finite() && step.is_finite()) || step <= 0.0 || end < start {
        return Err(EvalError::Invalid(format!(
            "cf grid needs finite start <= end and step > 0, got {start}:{end}:{step}"
        )));
    }
    let count = ((end - start) / step + 1e-9).floor() as usize;
    if count > 100_000 {
        return Err(EvalError::Invalid(format!("cf grid has {} points", count + 1)));
    }
    Ok((0..=count).map(|i| start + i as f64 * step).collect())
}

/// One hybrid run per `cf`, each scored against `gold`. Rows are sorted by
/// cf; the prepared LLM annotations, similarities and dependency terms are
/// shared by every run.
pub fn sweep_cf(
    prepared: &Prepared,
    gold: &[AnnotatedSentence],
    grid: &[f64],
    sigma_mode: SigmaMode,
    mode: MatchMode,
) -> Result<Vec<SweepPoint>, EvalError> {
    let mut grid = grid.to_vec();
    if grid.iter().any(|cf| !cf.is_finite()) {
        return Err(EvalError::Invalid("cf grid contains a non-finite value".into()));
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let mut rows = Vec::with_capacity(grid.len());
    for cf in grid {
        let out = prepared.apply(&HybridConfig { cf, sigma_mode })?;
        let r = evaluate_ate(&out.corpus, gold, mode)?;
        rows.push(SweepPoint {
            row: SweepRow {
                cf,
                s_size: out.report.s,
                precision: r.precision,
                recall: r.recall,
                f1: r.f1,
            },
            report: out.report,
        });
    }
    Ok(rows)
}
