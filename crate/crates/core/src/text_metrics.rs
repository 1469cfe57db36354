//! Text-generation metrics: BLEU, ROUGE-N, ROUGE-L, a reduced METEOR and
//! Levenshtein distance.
//!
//! All word-level metrics consume [`TokenizedText`]. The shipped tokenizer
//! lowercases, splits on whitespace and emits every punctuation character as
//! its own token; callers with their own tokenization can use
//! [`TokenizedText::from_tokens`].

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use rust_stemmers::{Algorithm, Stemmer};
use thiserror::Error;

/// Additive smoothing applied to each BLEU n-gram precision.
pub const BLEU_EPSILON: f64 = 1e-9;

pub const METEOR_ALPHA: f64 = 0.9;
pub const METEOR_BETA: f64 = 3.0;
pub const METEOR_GAMMA: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("{candidates} candidates but {references} references")]
    LengthMismatch { candidates: usize, references: usize },
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("unsupported n-gram order {0}")]
    UnsupportedOrder(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TokenizedText {
    tokens: Vec<String>,
    source: String,
}

impl TokenizedText {
    /// The standard word tokenizer.
    pub fn new(text: &str) -> TokenizedText {
        let mut tokens = Vec::new();
        let mut word = String::new();
        for c in text.chars().flat_map(char::to_lowercase) {
            if c.is_whitespace() {
                flush(&mut word, &mut tokens);
            } else if c.is_alphanumeric() {
                word.push(c);
            } else {
                flush(&mut word, &mut tokens);
                tokens.push(c.to_string());
            }
        }
        flush(&mut word, &mut tokens);
        TokenizedText { tokens, source: text.to_string() }
    }

    /// One token per unicode scalar value, no case folding. Used for SMILES.
    pub fn chars(text: &str) -> TokenizedText {
        TokenizedText {
            tokens: text.chars().map(String::from).collect(),
            source: text.to_string(),
        }
    }

    /// Pre-tokenized input; empty tokens are dropped.
    pub fn from_tokens<S: Into<String>>(tokens: impl IntoIterator<Item = S>) -> TokenizedText {
        let tokens: Vec<String> = tokens
            .into_iter()
            .map(Into::into)
            .filter(|t: &String| !t.is_empty())
            .collect();
        let source = tokens.join(" ");
        TokenizedText { tokens, source }
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

fn flush(word: &mut String, tokens: &mut Vec<String>) {
    if !word.is_empty() {
        tokens.push(std::mem::take(word));
    }
}

/// A corpus-level score with the number of pairs it aggregates.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricValue {
    pub name: String,
    pub value: f64,
    pub support: usize,
}

impl fmt::Display for MetricValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={:.6} (n={})", self.name, self.value, self.support)
    }
}

fn check_aligned(c: &[TokenizedText], r: &[TokenizedText]) -> Result<(), MetricError> {
    if c.len() != r.len() {
        return Err(MetricError::LengthMismatch { candidates: c.len(), references: r.len() });
    }
    if c.is_empty() {
        return Err(MetricError::EmptyCorpus);
    }
    Ok(())
}

fn ngram_counts<T: Eq + Hash>(tokens: &[T], n: usize) -> HashMap<&[T], usize> {
    let mut counts = HashMap::new();
    if n > 0 && tokens.len() >= n {
        for w in tokens.windows(n) {
            *counts.entry(w).or_insert(0) += 1;
        }
    }
    counts
}

fn clipped_overlap<T: Eq + Hash>(cand: &[T], reference: &[T], n: usize) -> usize {
    let r = ngram_counts(reference, n);
    ngram_counts(cand, n)
        .into_iter()
        .map(|(g, c)| c.min(r.get(g).copied().unwrap_or(0)))
        .sum()
}

/// Corpus BLEU with uniform weights over `1..=max_n`, additive smoothing and
/// brevity penalty.
pub fn bleu(
    candidates: &[TokenizedText],
    references: &[TokenizedText],
    max_n: usize,
) -> Result<MetricValue, MetricError> {
    if max_n != 2 && max_n != 4 {
        return Err(MetricError::UnsupportedOrder(max_n));
    }
    check_aligned(candidates, references)?;
    let mut matched = vec![0usize; max_n];
    let mut total = vec![0usize; max_n];
    let (mut c_len, mut r_len) = (0usize, 0usize);
    for (c, r) in candidates.iter().zip(references) {
        c_len += c.len();
        r_len += r.len();
        for n in 1..=max_n {
            matched[n - 1] += clipped_overlap(&c.tokens, &r.tokens, n);
            total[n - 1] += c.len().saturating_sub(n - 1);
        }
    }
    let log_mean = matched
        .iter()
        .zip(&total)
        .map(|(&m, &t)| ((m as f64 + BLEU_EPSILON) / (t as f64 + BLEU_EPSILON)).ln())
        .sum::<f64>()
        / max_n as f64;
    let bp = if c_len >= r_len {
        1.0
    } else if c_len == 0 {
        0.0
    } else {
        (1.0 - r_len as f64 / c_len as f64).exp()
    };
    Ok(MetricValue {
        name: format!("bleu_{max_n}"),
        value: (bp * log_mean.exp()).clamp(0.0, 1.0),
        support: candidates.len(),
    })
}

fn f1(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// Mean per-pair n-gram F1.
pub fn rouge_n(
    candidates: &[TokenizedText],
    references: &[TokenizedText],
    n: usize,
) -> Result<MetricValue, MetricError> {
    if n != 1 && n != 2 {
        return Err(MetricError::UnsupportedOrder(n));
    }
    check_aligned(candidates, references)?;
    let sum: f64 = candidates
        .iter()
        .zip(references)
        .map(|(c, r)| {
            let overlap = clipped_overlap(&c.tokens, &r.tokens, n);
            let p = ratio(overlap, c.len().saturating_sub(n - 1));
            let rc = ratio(overlap, r.len().saturating_sub(n - 1));
            f1(p, rc)
        })
        .sum();
    Ok(MetricValue {
        name: format!("rouge_{n}"),
        value: sum / candidates.len() as f64,
        support: candidates.len(),
    })
}

fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut row = vec![0usize; b.len() + 1];
    for x in a {
        let mut diag = 0;
        for (j, y) in b.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x == y { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[b.len()]
}

/// Mean per-pair LCS F1.
pub fn rouge_l(
    candidates: &[TokenizedText],
    references: &[TokenizedText],
) -> Result<MetricValue, MetricError> {
    check_aligned(candidates, references)?;
    let sum: f64 = candidates
        .iter()
        .zip(references)
        .map(|(c, r)| {
            let l = lcs_len(&c.tokens, &r.tokens);
            f1(ratio(l, c.len()), ratio(l, r.len()))
        })
        .sum();
    Ok(MetricValue {
        name: "rouge_l".into(),
        value: sum / candidates.len() as f64,
        support: candidates.len(),
    })
}

/// Aligns candidate to reference tokens: exact matches first, then matches on
/// stems, each stage greedy leftmost. Returns `(candidate idx, reference idx)`
/// pairs sorted by candidate index.
fn meteor_alignment(stemmer: &Stemmer, cand: &[String], reference: &[String]) -> Vec<(usize, usize)> {
    let mut ref_used = vec![false; reference.len()];
    let mut cand_match: Vec<Option<usize>> = vec![None; cand.len()];
    for (i, w) in cand.iter().enumerate() {
        if let Some(j) = (0..reference.len()).find(|&j| !ref_used[j] && reference[j] == *w) {
            ref_used[j] = true;
            cand_match[i] = Some(j);
        }
    }
    let ref_stems: Vec<String> = reference.iter().map(|w| stemmer.stem(w).into_owned()).collect();
    for (i, w) in cand.iter().enumerate() {
        if cand_match[i].is_some() {
            continue;
        }
        let stem = stemmer.stem(w);
        if let Some(j) = (0..reference.len()).find(|&j| !ref_used[j] && ref_stems[j] == stem) {
            ref_used[j] = true;
            cand_match[i] = Some(j);
        }
    }
    cand_match
        .into_iter()
        .enumerate()
        .filter_map(|(i, j)| j.map(|j| (i, j)))
        .collect()
}

fn meteor_pair(stemmer: &Stemmer, cand: &[String], reference: &[String]) -> f64 {
    let alignment = meteor_alignment(stemmer, cand, reference);
    let m = alignment.len();
    if m == 0 {
        return 0.0;
    }
    let chunks = 1 + alignment
        .windows(2)
        .filter(|w| !(w[1].0 == w[0].0 + 1 && w[1].1 == w[0].1 + 1))
        .count();
    let p = m as f64 / cand.len() as f64;
    let r = m as f64 / reference.len() as f64;
    let f_mean = p * r / (METEOR_ALPHA * p + (1.0 - METEOR_ALPHA) * r);
    let penalty = METEOR_GAMMA * (chunks as f64 / m as f64).powf(METEOR_BETA);
    f_mean * (1.0 - penalty)
}

/// METEOR restricted to exact and stem matching (English Snowball stemmer),
/// averaged over pairs.
pub fn meteor_lite(
    candidates: &[TokenizedText],
    references: &[TokenizedText],
) -> Result<MetricValue, MetricError> {
    check_aligned(candidates, references)?;
    let stemmer = Stemmer::create(Algorithm::English);
    let sum: f64 = candidates
        .iter()
        .zip(references)
        .map(|(c, r)| meteor_pair(&stemmer, &c.tokens, &r.tokens))
        .sum();
    Ok(MetricValue {
        name: "meteor_lite".into(),
        value: sum / candidates.len() as f64,
        support: candidates.len(),
    })
}

/// Edit distance over unicode scalar values.
pub fn levenshtein(a: &str, b: &str) -> usize {
    strsim::levenshtein(a, b)
}
