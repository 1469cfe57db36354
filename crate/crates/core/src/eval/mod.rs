//! Per-task evaluation pipelines and their reports.
//!
//! Per-pair work (parsing, canonicalization, fingerprints) runs on the rayon
//! pool; results are collected in input order and reduced sequentially, so a
//! report is identical whatever the thread count.

mod frechet;
mod oracle;
mod report;
mod tasks;

use std::io::BufRead;

use thiserror::Error;

use crate::dataset::TaskKind;
use crate::text_metrics::MetricError;

pub use frechet::{frechet_distance, frechet_distance_with, frechet_score, FrechetError, FrechetOptions, FrechetScore};
pub use oracle::{ForwardOracle, LookupOracle, OracleError};
pub use report::{MetricEntry, MetricReport};
pub use tasks::{
    eval_forward, eval_mol2text, eval_para2actions, eval_retro, eval_text2mol, evaluate, FpConfig,
    SmilesBleuTokens, Text2MolConfig,
};

/// Environment variable capping worker threads; `0` or unset means automatic.
pub const THREADS_ENV: &str = "CHEMTEXT_THREADS";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionPair {
    pub id: String,
    pub task: TaskKind,
    pub prediction: String,
    pub reference: String,
}

impl PredictionPair {
    pub fn new(id: impl Into<String>, task: TaskKind, prediction: &str, reference: &str) -> PredictionPair {
        PredictionPair {
            id: id.into(),
            task,
            prediction: prediction.to_string(),
            reference: reference.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("pair `{id}` has task {found}, expected {expected}")]
    MixedTasks { expected: TaskKind, found: TaskKind, id: String },
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("line {line}: {message}")]
    Record { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(String),
    #[error("task {0} needs a forward oracle")]
    MissingOracle(TaskKind),
}

impl From<std::io::Error> for EvalError {
    fn from(e: std::io::Error) -> Self {
        EvalError::Io(e.to_string())
    }
}

#[derive(serde::Deserialize)]
struct RawPair {
    id: serde_json::Value,
    task: String,
    prediction: String,
    reference: String,
}

/// Reads a predictions JSONL file (`id`, `task`, `prediction`, `reference`).
/// Numeric ids are accepted and kept in their decimal form.
pub fn read_predictions<R: BufRead>(reader: R) -> Result<Vec<PredictionPair>, EvalError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| EvalError::Record { line: i + 1, message };
        let raw: RawPair = serde_json::from_str(&line).map_err(|e| err(e.to_string()))?;
        let id = match raw.id {
            serde_json::Value::String(s) => s,
            serde_json::Value::Number(n) => n.to_string(),
            other => return Err(err(format!("id must be a string or number, got {other}"))),
        };
        let task: TaskKind = raw.task.parse().map_err(|e: crate::dataset::DatasetError| err(e.to_string()))?;
        out.push(PredictionPair { id, task, prediction: raw.prediction, reference: raw.reference });
    }
    Ok(out)
}

/// Builds a rayon pool honouring [`THREADS_ENV`].
pub fn thread_pool_from_env() -> rayon::ThreadPool {
    let n = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .expect("thread pool builds")
}

fn check_task(pairs: &[PredictionPair], expected: TaskKind) -> Result<(), EvalError> {
    match pairs.iter().find(|p| p.task != expected) {
        Some(p) => Err(EvalError::MixedTasks { expected, found: p.task, id: p.id.clone() }),
        None => Ok(()),
    }
}
