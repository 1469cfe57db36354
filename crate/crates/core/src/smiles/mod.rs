//! SMILES tokenization, parsing, validation and canonicalization.

mod canon;
pub mod element;
mod error;
mod lexer;
mod molecule;
mod parser;
mod validity;

pub use canon::{canonical_smiles, canonicalize};
pub use element::Element;
pub use error::{CanonError, LexError, LexErrorKind, ParseError, ParseErrorKind, SmilesError};
pub use lexer::{tokenize, Token, TokenKind};
pub use molecule::{Atom, Bond, BondOrder, BondStereo, Chirality, Molecule, NeighborRef};
pub use parser::parse;
pub use validity::{check_smiles, parse_valid, validate, ValidityResult, Violation};

impl Molecule {
    /// Tokenizes and parses without the valence check.
    pub fn from_smiles(smiles: &str) -> Result<Molecule, SmilesError> {
        let tokens = tokenize(smiles)?;
        Ok(parse(&tokens)?)
    }
}
