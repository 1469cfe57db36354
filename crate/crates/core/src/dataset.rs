//! Task prompts, JSONL records and balanced multi-task mixing.
//!
//! Randomness comes from `Xoshiro256PlusPlus::seed_from_u64`, which expands
//! the 64-bit seed through SplitMix64. The same seed and inputs always give
//! byte-identical output.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    Forward,
    Retro,
    #[serde(rename = "para2actions")]
    Para2Actions,
    #[serde(rename = "text2mol")]
    Text2Mol,
    #[serde(rename = "mol2text")]
    Mol2Text,
}

impl TaskKind {
    pub const ALL: [TaskKind; 5] = [
        TaskKind::Forward,
        TaskKind::Retro,
        TaskKind::Para2Actions,
        TaskKind::Text2Mol,
        TaskKind::Mol2Text,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TaskKind::Forward => "forward",
            TaskKind::Retro => "retro",
            TaskKind::Para2Actions => "para2actions",
            TaskKind::Text2Mol => "text2mol",
            TaskKind::Mol2Text => "mol2text",
        }
    }

    /// Prompt text preceding the input.
    pub fn prompt_prefix(self) -> &'static str {
        match self {
            TaskKind::Forward => "Predict the product of the following reaction: ",
            TaskKind::Retro => "Predict the reaction that produces the following product: ",
            TaskKind::Para2Actions => "Which actions are described in the following paragraph: ",
            TaskKind::Text2Mol => "Write in SMILES the described molecule: ",
            TaskKind::Mol2Text => "Caption the following SMILES: ",
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TaskKind {
    type Err = DatasetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TaskKind::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| DatasetError::UnknownTask(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DatasetError {
    #[error("prompt input is empty")]
    EmptyInput,
    #[error("record target is empty")]
    EmptyTarget,
    #[error("unknown task `{0}`")]
    UnknownTask(String),
    #[error("stream for task {0} is empty")]
    EmptyStream(TaskKind),
    #[error("per-task count must be positive")]
    ZeroPerTask,
    #[error("bad split fractions: {0}")]
    BadFractions(String),
    #[error("line {line}: {message}")]
    Record { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for DatasetError {
    fn from(e: std::io::Error) -> Self {
        DatasetError::Io(e.to_string())
    }
}

pub fn render_prompt(task: TaskKind, input: &str) -> Result<String, DatasetError> {
    if input.is_empty() {
        return Err(DatasetError::EmptyInput);
    }
    Ok(format!("{}{}", task.prompt_prefix(), input))
}

/// One training example.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskRecord {
    pub task: TaskKind,
    pub source: String,
    pub target: String,
    pub prompt: String,
    /// Fields present in the input JSON that this crate does not interpret.
    /// Kept in memory, never written back out.
    pub extra: serde_json::Map<String, serde_json::Value>,
}

impl TaskRecord {
    pub fn new(task: TaskKind, source: &str, target: &str) -> Result<TaskRecord, DatasetError> {
        if target.is_empty() {
            return Err(DatasetError::EmptyTarget);
        }
        Ok(TaskRecord {
            task,
            prompt: render_prompt(task, source)?,
            source: source.to_string(),
            target: target.to_string(),
            extra: serde_json::Map::new(),
        })
    }

    /// Recovers the source by stripping the task's prompt prefix.
    pub fn source_from_prompt(&self) -> Option<&str> {
        self.prompt.strip_prefix(self.task.prompt_prefix())
    }
}

#[derive(Deserialize)]
struct RawRecord {
    task: String,
    source: String,
    target: String,
    prompt: Option<String>,
    #[serde(flatten)]
    extra: serde_json::Map<String, serde_json::Value>,
}

#[derive(Serialize)]
struct OutRecord<'a> {
    task: TaskKind,
    source: &'a str,
    target: &'a str,
    prompt: &'a str,
}

/// Parses one JSONL line. A missing `prompt` is rendered; a present one must
/// equal the rendered template.
pub fn parse_record(line: &str, line_no: usize) -> Result<TaskRecord, DatasetError> {
    let err = |message: String| DatasetError::Record { line: line_no, message };
    let raw: RawRecord = serde_json::from_str(line).map_err(|e| err(e.to_string()))?;
    let task: TaskKind = raw.task.parse().map_err(|e: DatasetError| err(e.to_string()))?;
    let mut rec = TaskRecord::new(task, &raw.source, &raw.target).map_err(|e| err(e.to_string()))?;
    if let Some(p) = raw.prompt {
        if p != rec.prompt {
            return Err(err(format!("prompt does not match the {task} template")));
        }
    }
    rec.extra = raw.extra;
    Ok(rec)
}

pub fn read_jsonl<R: BufRead>(reader: R) -> Result<Vec<TaskRecord>, DatasetError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_record(&line, i + 1)?);
    }
    Ok(out)
}

pub fn record_to_json(rec: &TaskRecord) -> String {
    serde_json::to_string(&OutRecord {
        task: rec.task,
        source: &rec.source,
        target: &rec.target,
        prompt: &rec.prompt,
    })
    .expect("records serialize")
}

pub fn write_jsonl<W: Write>(mut writer: W, records: &[TaskRecord]) -> Result<(), DatasetError> {
    for rec in records {
        writer.write_all(record_to_json(rec).as_bytes())?;
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixStrategy {
    EqualMix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixPlan {
    pub counts: BTreeMap<TaskKind, usize>,
    pub seed: u64,
    pub strategy: MixStrategy,
}

impl MixPlan {
    pub fn equal(tasks: impl IntoIterator<Item = TaskKind>, per_task: usize, seed: u64) -> MixPlan {
        MixPlan {
            counts: tasks.into_iter().map(|t| (t, per_task)).collect(),
            seed,
            strategy: MixStrategy::EqualMix,
        }
    }
}

/// Draws exactly `per_task` records from every stream and shuffles the union.
///
/// Short streams are repeated whole as often as they fit, then topped up with
/// a seeded sample without replacement. Long streams are subsampled without
/// replacement. Streams are visited in [`TaskKind`] order and all draws come
/// from one generator, so the result depends only on inputs and seed.
pub fn equal_mix(
    streams: &BTreeMap<TaskKind, Vec<TaskRecord>>,
    per_task: usize,
    seed: u64,
) -> Result<Vec<TaskRecord>, DatasetError> {
    mix(streams, &MixPlan::equal(streams.keys().copied(), per_task, seed))
}

pub fn mix(
    streams: &BTreeMap<TaskKind, Vec<TaskRecord>>,
    plan: &MixPlan,
) -> Result<Vec<TaskRecord>, DatasetError> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(plan.seed);
    let mut out = Vec::with_capacity(plan.counts.values().sum());
    for (&task, &count) in &plan.counts {
        if count == 0 {
            return Err(DatasetError::ZeroPerTask);
        }
        let stream = streams.get(&task).filter(|s| !s.is_empty()).ok_or(DatasetError::EmptyStream(task))?;
        let len = stream.len();
        if len >= count {
            let mut picks = index::sample(&mut rng, len, count).into_vec();
            picks.sort_unstable();
            out.extend(picks.into_iter().map(|i| stream[i].clone()));
        } else {
            for _ in 0..count / len {
                out.extend(stream.iter().cloned());
            }
            let mut picks = index::sample(&mut rng, len, count % len).into_vec();
            picks.sort_unstable();
            out.extend(picks.into_iter().map(|i| stream[i].clone()));
        }
    }
    out.shuffle(&mut rng);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Splits {
    pub train: Vec<TaskRecord>,
    pub valid: Vec<TaskRecord>,
    pub test: Vec<TaskRecord>,
}

/// Seeded train/valid/test split, stratified by task.
///
/// Per task with `n` records, train gets `round(n·f_train)`, valid gets
/// `round(n·f_valid)` (capped by what is left) and test the remainder. Each
/// split keeps the input order of its records.
pub fn build_splits(records: &[TaskRecord], fractions: [f64; 3], seed: u64) -> Result<Splits, DatasetError> {
    if fractions.iter().any(|f| !(0.0..=1.0).contains(f)) {
        return Err(DatasetError::BadFractions(format!("{fractions:?} outside [0, 1]")));
    }
    let sum: f64 = fractions.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(DatasetError::BadFractions(format!("{fractions:?} sum to {sum}")));
    }
    let mut by_task: BTreeMap<TaskKind, Vec<usize>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        by_task.entry(r.task).or_default().push(i);
    }
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut assignment = vec![0u8; records.len()];
    for idx in by_task.values_mut() {
        let n = idx.len();
        idx.shuffle(&mut rng);
        let n_train = ((n as f64 * fractions[0]).round() as usize).min(n);
        let n_valid = ((n as f64 * fractions[1]).round() as usize).min(n - n_train);
        for (k, &i) in idx.iter().enumerate() {
            assignment[i] = if k < n_train {
                0
            } else if k < n_train + n_valid {
                1
            } else {
                2
            };
        }
    }
    let mut splits = Splits::default();
    for (rec, a) in records.iter().zip(assignment) {
        match a {
            0 => splits.train.push(rec.clone()),
            1 => splits.valid.push(rec.clone()),
            _ => splits.test.push(rec.clone()),
        }
    }
    Ok(splits)
}
