use std::fmt;

use super::element::Element;
use super::error::{ParseErrorKind, SmilesError};
use super::molecule::Molecule;
use super::{lexer, parser};

/// Hydrogen count implied for a bare (non-bracket) atom.
///
/// Aliphatic atoms are filled up to the smallest allowed valence that
/// accommodates their bonds. Aromatic atoms reserve one valence unit for the
/// ring pi system and use only the lowest valence, so `c` in benzene carries
/// one hydrogen while `n` in pyridine and `s` in thiophene carry none.
pub(crate) fn default_implicit_hydrogens(element: Element, aromatic: bool, demand: u8) -> u8 {
    let Some(valences) = element.allowed_valences(0) else {
        return 0;
    };
    if aromatic {
        return valences[0].saturating_sub(demand + 1);
    }
    valences
        .iter()
        .find(|&&v| v >= demand)
        .map(|&v| v - demand)
        .unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Lex { position: usize },
    Parse { position: usize, kind: ParseErrorKind },
    UnclosedRing { label: u8 },
    UnbalancedBranch { position: usize },
    Valence { atom: usize, used: u8, allowed: u8 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Lex { position } => write!(f, "lex error at {position}"),
            Violation::Parse { position, kind } => write!(f, "parse error at {position}: {kind:?}"),
            Violation::UnclosedRing { label } => write!(f, "unclosed ring {label}"),
            Violation::UnbalancedBranch { position } => write!(f, "unbalanced branch at {position}"),
            Violation::Valence { atom, used, allowed } => {
                write!(f, "valence {used} exceeds {allowed} at atom {atom}")
            }
        }
    }
}

/// Outcome of a validity check; `valid` is true exactly when `reasons` is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidityResult {
    pub valid: bool,
    pub reasons: Vec<Violation>,
}

impl ValidityResult {
    fn from_reasons(reasons: Vec<Violation>) -> ValidityResult {
        ValidityResult {
            valid: reasons.is_empty(),
            reasons,
        }
    }
}

impl fmt::Display for ValidityResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.valid {
            return f.write_str("valid");
        }
        let parts: Vec<String> = self.reasons.iter().map(|r| r.to_string()).collect();
        f.write_str(&parts.join("; "))
    }
}

impl From<&SmilesError> for Violation {
    fn from(err: &SmilesError) -> Violation {
        match err {
            SmilesError::Lex(e) => Violation::Lex { position: e.position },
            SmilesError::Parse(e) => match e.kind {
                ParseErrorKind::UnclosedRing(label) => Violation::UnclosedRing { label },
                ParseErrorKind::UnbalancedBranch => Violation::UnbalancedBranch { position: e.position },
                ref kind => Violation::Parse {
                    position: e.position,
                    kind: kind.clone(),
                },
            },
        }
    }
}

/// Checks each atom's bond orders plus hydrogens against the default valence table.
pub fn validate(mol: &Molecule) -> ValidityResult {
    let mut reasons = Vec::new();
    for (i, atom) in mol.atoms().iter().enumerate() {
        let Some(valences) = atom.element.allowed_valences(atom.charge) else {
            continue;
        };
        let max = *valences.last().expect("valence tables are non-empty");
        let mut used = mol.bond_order_sum(i) + atom.hydrogens();
        if atom.aromatic {
            // group 13/14 aromatic atoms need a free unit for the ring pi bond
            if matches!(atom.element.effective_group(atom.charge), Some(13 | 14)) {
                used += 1;
            }
        }
        if used > max {
            reasons.push(Violation::Valence {
                atom: i,
                used,
                allowed: max,
            });
        }
    }
    ValidityResult::from_reasons(reasons)
}

/// Tokenize, parse and validate in one step.
///
/// Returns the molecule alongside the result when parsing succeeded.
pub fn check_smiles(smiles: &str) -> (ValidityResult, Option<Molecule>) {
    let parsed = lexer::tokenize(smiles)
        .map_err(SmilesError::from)
        .and_then(|toks| parser::parse(&toks).map_err(SmilesError::from));
    match parsed {
        Ok(mol) => (validate(&mol), Some(mol)),
        Err(e) => (ValidityResult::from_reasons(vec![Violation::from(&e)]), None),
    }
}

/// Parses a SMILES string and returns the molecule only if it passes validation.
pub fn parse_valid(smiles: &str) -> Option<Molecule> {
    match check_smiles(smiles) {
        (r, Some(m)) if r.valid => Some(m),
        _ => None,
    }
}
