use std::collections::HashMap;
use std::io::BufRead;

use thiserror::Error;

use crate::smiles::canonical_smiles;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("no product known for `{0}`")]
    Unknown(String),
    #[error("oracle failed: {0}")]
    Failed(String),
    #[error("line {line}: {message}")]
    Table { line: usize, message: String },
}

/// Stand-in for a forward reaction model in roundtrip evaluation.
///
/// Implementations must be deterministic. The harness calls oracles from
/// several threads unless [`ForwardOracle::concurrent`] returns false, in
/// which case calls are made one at a time in input order.
pub trait ForwardOracle: Sync {
    fn predict_product(&self, precursors: &str) -> Result<String, OracleError>;

    fn concurrent(&self) -> bool {
        true
    }
}

impl<F> ForwardOracle for F
where
    F: Fn(&str) -> Result<String, OracleError> + Sync,
{
    fn predict_product(&self, precursors: &str) -> Result<String, OracleError> {
        self(precursors)
    }
}

/// Table-driven oracle keyed by the canonical form of the precursors.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LookupOracle {
    table: HashMap<String, String>,
}

fn key(smiles: &str) -> String {
    canonical_smiles(smiles).unwrap_or_else(|| smiles.to_string())
}

impl LookupOracle {
    pub fn new() -> LookupOracle {
        LookupOracle::default()
    }

    pub fn insert(&mut self, precursors: &str, product: &str) {
        self.table.insert(key(precursors), product.to_string());
    }

    /// Reads `precursors<TAB>product` lines; blank and `#` lines are skipped.
    pub fn from_tsv<R: BufRead>(reader: R) -> Result<LookupOracle, OracleError> {
        let mut oracle = LookupOracle::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| OracleError::Table { line: i + 1, message: e.to_string() })?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let (pre, prod) = t.split_once('\t').ok_or_else(|| OracleError::Table {
                line: i + 1,
                message: "expected `precursors<TAB>product`".into(),
            })?;
            oracle.insert(pre.trim(), prod.trim());
        }
        Ok(oracle)
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

impl ForwardOracle for LookupOracle {
    fn predict_product(&self, precursors: &str) -> Result<String, OracleError> {
        self.table
            .get(&key(precursors))
            .cloned()
            .ok_or_else(|| OracleError::Unknown(precursors.to_string()))
    }
}
