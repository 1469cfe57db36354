use rayon::prelude::*;

use super::report::MetricReport;
use super::{check_task, EvalError, ForwardOracle, PredictionPair};
use crate::dataset::TaskKind;
use crate::fingerprints::{
    key_fingerprint, morgan_fingerprint, path_fingerprint, tanimoto, BitFingerprint, KeyTable,
    DEFAULT_MORGAN_RADIUS, DEFAULT_NBITS, DEFAULT_PATH_LENGTH,
};
use crate::smiles::{canonicalize, parse_valid, tokenize, Molecule};
use crate::text_metrics::{
    bleu, levenshtein, meteor_lite, rouge_l, rouge_n, MetricError, MetricValue, TokenizedText,
};

/// Fingerprint settings for the FTS metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FpConfig {
    pub nbits: usize,
    pub radius: usize,
    pub path_length: usize,
}

impl Default for FpConfig {
    fn default() -> Self {
        FpConfig {
            nbits: DEFAULT_NBITS,
            radius: DEFAULT_MORGAN_RADIUS,
            path_length: DEFAULT_PATH_LENGTH,
        }
    }
}

/// How SMILES strings are split for the text2mol BLEU column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SmilesBleuTokens {
    #[default]
    Characters,
    /// Lexer tokens (`Cl`, `[NH3+]`, `%12`, ...); unlexable strings fall back
    /// to characters.
    Smiles,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Text2MolConfig {
    pub fp: FpConfig,
    pub bleu_tokens: SmilesBleuTokens,
}

fn mean_value(name: &str, sum: f64, support: usize) -> MetricValue {
    MetricValue { name: name.to_string(), value: sum / support as f64, support }
}

fn words(texts: impl Iterator<Item = String>) -> Vec<TokenizedText> {
    texts.map(|t| TokenizedText::new(&t)).collect()
}

pub fn eval_mol2text(pairs: &[PredictionPair]) -> Result<MetricReport, EvalError> {
    check_task(pairs, TaskKind::Mol2Text)?;
    let cands = words(pairs.iter().map(|p| p.prediction.clone()));
    let refs = words(pairs.iter().map(|p| p.reference.clone()));
    let mut report = MetricReport::new(TaskKind::Mol2Text, pairs.len());
    report.put(bleu(&cands, &refs, 2)?);
    report.put(bleu(&cands, &refs, 4)?);
    report.put(rouge_n(&cands, &refs, 1)?);
    report.put(rouge_n(&cands, &refs, 2)?);
    report.put(rouge_l(&cands, &refs)?);
    report.put(meteor_lite(&cands, &refs)?);
    Ok(report)
}

fn normalize_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn eval_para2actions(pairs: &[PredictionPair]) -> Result<MetricReport, EvalError> {
    check_task(pairs, TaskKind::Para2Actions)?;
    let cands = words(pairs.iter().map(|p| p.prediction.clone()));
    let refs = words(pairs.iter().map(|p| p.reference.clone()));
    let mut report = MetricReport::new(TaskKind::Para2Actions, pairs.len());
    report.put(bleu(&cands, &refs, 4)?);
    let hits = pairs
        .iter()
        .filter(|p| normalize_ws(&p.prediction) == normalize_ws(&p.reference))
        .count();
    report.put(mean_value("accuracy", hits as f64, pairs.len()));
    Ok(report)
}

fn canon_of(mol: &Option<Molecule>) -> Option<String> {
    mol.as_ref().and_then(|m| canonicalize(m).ok())
}

pub fn eval_forward(pairs: &[PredictionPair]) -> Result<MetricReport, EvalError> {
    check_task(pairs, TaskKind::Forward)?;
    if pairs.is_empty() {
        return Err(MetricError::EmptyCorpus.into());
    }
    let scored: Vec<(bool, bool)> = pairs
        .par_iter()
        .map(|p| {
            let pred = canon_of(&parse_valid(&p.prediction));
            let reference = canon_of(&parse_valid(&p.reference));
            let correct = pred.is_some() && pred == reference;
            (pred.is_some(), correct)
        })
        .collect();
    let mut report = MetricReport::new(TaskKind::Forward, pairs.len());
    let mut valid = 0;
    let mut hits = 0;
    for &(v, c) in &scored {
        valid += v as usize;
        hits += c as usize;
        if !v {
            report.skip("invalid_prediction");
        }
    }
    report.n_valid_pred = Some(valid);
    report.put(mean_value("accuracy", hits as f64, pairs.len()));
    Ok(report)
}

#[derive(Debug)]
enum RoundTrip {
    Hit,
    Miss,
    OracleFailed,
}

/// Roundtrip accuracy: the oracle's product for the predicted precursors
/// must canonicalize to the reference product.
pub fn eval_retro(pairs: &[PredictionPair], oracle: &dyn ForwardOracle) -> Result<MetricReport, EvalError> {
    check_task(pairs, TaskKind::Retro)?;
    if pairs.is_empty() {
        return Err(MetricError::EmptyCorpus.into());
    }
    let score = |p: &PredictionPair| -> (bool, RoundTrip) {
        let valid = parse_valid(&p.prediction).is_some();
        let outcome = match oracle.predict_product(&p.prediction) {
            Err(_) => RoundTrip::OracleFailed,
            Ok(product) => {
                let got = canon_of(&parse_valid(&product));
                let want = canon_of(&parse_valid(&p.reference));
                if got.is_some() && got == want {
                    RoundTrip::Hit
                } else {
                    RoundTrip::Miss
                }
            }
        };
        (valid, outcome)
    };
    let scored: Vec<(bool, RoundTrip)> = if oracle.concurrent() {
        pairs.par_iter().map(score).collect()
    } else {
        pairs.iter().map(score).collect()
    };
    let mut report = MetricReport::new(TaskKind::Retro, pairs.len());
    let mut valid = 0;
    let mut hits = 0;
    for (v, outcome) in &scored {
        valid += *v as usize;
        match outcome {
            RoundTrip::Hit => hits += 1,
            RoundTrip::Miss => {}
            RoundTrip::OracleFailed => report.skip("oracle_failed"),
        }
    }
    report.n_valid_pred = Some(valid);
    report.put(mean_value("roundtrip_accuracy", hits as f64, pairs.len()));
    Ok(report)
}

struct Text2MolPair {
    valid_pred: bool,
    valid_ref: bool,
    correct: bool,
    edit: usize,
    fts: Option<[f64; 3]>,
}

fn smiles_tokens(s: &str, mode: SmilesBleuTokens) -> TokenizedText {
    match mode {
        SmilesBleuTokens::Characters => TokenizedText::chars(s),
        SmilesBleuTokens::Smiles => match tokenize(s) {
            Ok(tokens) => TokenizedText::from_tokens(tokens.into_iter().map(|t| t.text)),
            Err(_) => TokenizedText::chars(s),
        },
    }
}

fn fts(a: &Molecule, b: &Molecule, keys: &KeyTable, cfg: &FpConfig) -> Option<[f64; 3]> {
    let sim = |x: BitFingerprint, y: BitFingerprint| tanimoto(&x, &y).ok();
    Some([
        sim(key_fingerprint(a, keys).ok()?, key_fingerprint(b, keys).ok()?)?,
        sim(
            path_fingerprint(a, cfg.path_length, cfg.nbits).ok()?,
            path_fingerprint(b, cfg.path_length, cfg.nbits).ok()?,
        )?,
        sim(
            morgan_fingerprint(a, cfg.radius, cfg.nbits).ok()?,
            morgan_fingerprint(b, cfg.radius, cfg.nbits).ok()?,
        )?,
    ])
}

const FTS_NAMES: [&str; 3] = ["maccs_fts", "rdk_fts", "morgan_fts"];

pub fn eval_text2mol(pairs: &[PredictionPair], config: &Text2MolConfig) -> Result<MetricReport, EvalError> {
    check_task(pairs, TaskKind::Text2Mol)?;
    if pairs.is_empty() {
        return Err(MetricError::EmptyCorpus.into());
    }
    let keys = KeyTable::default_table();
    let scored: Vec<Text2MolPair> = pairs
        .par_iter()
        .map(|p| {
            let pred = parse_valid(&p.prediction);
            let reference = parse_valid(&p.reference);
            let (cp, cr) = (canon_of(&pred), canon_of(&reference));
            let fts = match (&pred, &reference) {
                (Some(a), Some(b)) => fts(a, b, &keys, &config.fp),
                _ => None,
            };
            Text2MolPair {
                valid_pred: pred.is_some(),
                valid_ref: reference.is_some(),
                correct: cp.is_some() && cp == cr,
                edit: levenshtein(&p.prediction, &p.reference),
                fts,
            }
        })
        .collect();

    let mut report = MetricReport::new(TaskKind::Text2Mol, pairs.len());
    let cands: Vec<TokenizedText> = pairs.iter().map(|p| smiles_tokens(&p.prediction, config.bleu_tokens)).collect();
    let refs: Vec<TokenizedText> = pairs.iter().map(|p| smiles_tokens(&p.reference, config.bleu_tokens)).collect();
    let mut b = bleu(&cands, &refs, 4)?;
    b.name = "bleu".into();
    report.put(b);

    let (mut valid, mut hits, mut edits) = (0usize, 0usize, 0usize);
    let mut fts_sum = [0.0f64; 3];
    let mut fts_n = 0usize;
    for s in &scored {
        valid += s.valid_pred as usize;
        hits += s.correct as usize;
        edits += s.edit;
        match (s.valid_pred, s.valid_ref) {
            (true, true) => {}
            (false, true) => report.skip("invalid_prediction"),
            (true, false) => report.skip("invalid_reference"),
            (false, false) => report.skip("invalid_prediction_and_reference"),
        }
        if let Some(f) = s.fts {
            fts_n += 1;
            for k in 0..3 {
                fts_sum[k] += f[k];
            }
        }
    }
    report.n_valid_pred = Some(valid);
    report.put(mean_value("accuracy", hits as f64, pairs.len()));
    report.put(mean_value("levenshtein", edits as f64, pairs.len()));
    report.put(mean_value("validity", valid as f64, pairs.len()));
    for k in 0..3 {
        if fts_n == 0 {
            report.put_absent(FTS_NAMES[k], "no pair with both sides valid");
        } else {
            report.put(mean_value(FTS_NAMES[k], fts_sum[k], fts_n));
        }
    }
    Ok(report)
}

/// Dispatches on `task`. `oracle` is required for retro.
pub fn evaluate(
    task: TaskKind,
    pairs: &[PredictionPair],
    config: &Text2MolConfig,
    oracle: Option<&dyn ForwardOracle>,
) -> Result<MetricReport, EvalError> {
    match task {
        TaskKind::Forward => eval_forward(pairs),
        TaskKind::Retro => eval_retro(pairs, oracle.ok_or(EvalError::MissingOracle(task))?),
        TaskKind::Para2Actions => eval_para2actions(pairs),
        TaskKind::Text2Mol => eval_text2mol(pairs, config),
        TaskKind::Mol2Text => eval_mol2text(pairs),
    }
}
