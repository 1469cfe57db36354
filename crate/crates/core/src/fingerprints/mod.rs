//! Molecular fingerprints and Tanimoto similarity.
//!
//! Three schemes are provided: circular (`morgan`), linear path (`path`) and
//! substructure keys (`keys`). Hashing uses 64-bit FNV-1a over a fixed byte
//! serialization, so bit positions are stable across platforms and releases.
//! No bit-level parity with other cheminformatics toolkits is implied.

mod keys;
mod morgan;
mod path;

use std::fmt;

use thiserror::Error;

use crate::smiles::{validate, Molecule};

pub use keys::{key_fingerprint, KeyDefinition, KeyTable, Pattern};
pub use morgan::morgan_fingerprint;
pub use path::path_fingerprint;

pub const DEFAULT_NBITS: usize = 2048;
pub const DEFAULT_MORGAN_RADIUS: usize = 2;
pub const DEFAULT_PATH_LENGTH: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FingerprintError {
    #[error("molecule failed validation: {0}")]
    InvalidMolecule(String),
    #[error("fingerprint width must be positive")]
    ZeroWidth,
    #[error("key table line {line}: {message}")]
    KeyTable { line: usize, message: String },
    #[error("key table is empty")]
    EmptyKeyTable,
    #[error("cannot compare {a} fingerprint with {b} fingerprint")]
    SchemeMismatch { a: String, b: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Morgan,
    Path,
    Keys,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Morgan => "morgan",
            Scheme::Path => "path",
            Scheme::Keys => "keys",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "morgan" => Ok(Scheme::Morgan),
            "path" => Ok(Scheme::Path),
            "keys" => Ok(Scheme::Keys),
            other => Err(format!("unknown fingerprint scheme `{other}`")),
        }
    }
}

/// Fixed-width bit vector tagged with the scheme that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitFingerprint {
    scheme: Scheme,
    nbits: usize,
    words: Vec<u64>,
}

impl BitFingerprint {
    pub fn new(scheme: Scheme, nbits: usize) -> Result<BitFingerprint, FingerprintError> {
        if nbits == 0 {
            return Err(FingerprintError::ZeroWidth);
        }
        Ok(BitFingerprint {
            scheme,
            nbits,
            words: vec![0; nbits.div_ceil(64)],
        })
    }

    /// Builds a fingerprint from set-bit indices; indices must be `< nbits`.
    pub fn from_indices(
        scheme: Scheme,
        nbits: usize,
        indices: impl IntoIterator<Item = usize>,
    ) -> Result<BitFingerprint, FingerprintError> {
        let mut fp = BitFingerprint::new(scheme, nbits)?;
        for i in indices {
            assert!(i < nbits, "bit index {i} out of range for {nbits} bits");
            fp.set(i);
        }
        Ok(fp)
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn nbits(&self) -> usize {
        self.nbits
    }

    pub(crate) fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.nbits && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Set-bit indices in increasing order.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            (0..64).filter(move |b| w >> b & 1 == 1).map(move |b| wi * 64 + b)
        })
    }

    /// True if every bit of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &BitFingerprint) -> bool {
        self.nbits == other.nbits
            && self
                .words
                .iter()
                .zip(&other.words)
                .all(|(a, b)| a & !b == 0)
    }
}

impl fmt::Display for BitFingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.ones().map(|i| i.to_string()).collect();
        write!(f, "{} {} {}", self.scheme.name(), self.nbits, idx.join(","))
    }
}

/// |A ∩ B| / |A ∪ B|. Two empty fingerprints score 0.0.
pub fn tanimoto(a: &BitFingerprint, b: &BitFingerprint) -> Result<f64, FingerprintError> {
    if a.scheme != b.scheme || a.nbits != b.nbits {
        return Err(FingerprintError::SchemeMismatch {
            a: format!("{}/{}", a.scheme.name(), a.nbits),
            b: format!("{}/{}", b.scheme.name(), b.nbits),
        });
    }
    let (mut inter, mut union) = (0u64, 0u64);
    for (x, y) in a.words.iter().zip(&b.words) {
        inter += (x & y).count_ones() as u64;
        union += (x | y).count_ones() as u64;
    }
    if union == 0 {
        return Ok(0.0);
    }
    Ok(inter as f64 / union as f64)
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// 64-bit FNV-1a.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}

fn ensure_valid(mol: &Molecule) -> Result<(), FingerprintError> {
    let v = validate(mol);
    if v.valid {
        Ok(())
    } else {
        Err(FingerprintError::InvalidMolecule(v.to_string()))
    }
}
