use thiserror::Error;

use super::validity::ValidityResult;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LexErrorKind {
    UnexpectedChar(char),
    UnterminatedBracket,
    BadRingLabel,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("lex error at position {position}: {kind:?}")]
pub struct LexError {
    pub position: usize,
    pub kind: LexErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Empty,
    UnbalancedBranch,
    EmptyBranch,
    UnclosedRing(u8),
    RingClosureWithoutAtom,
    BondWithoutAtom,
    DanglingDot,
    ConflictingRingBond(u8),
    SelfBond,
    DuplicateBond,
    AromaticBondOnAliphaticAtom,
    UnsupportedBond(String),
    BadBracketAtom(String),
    UnknownElement(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at position {position}: {kind:?}")]
pub struct ParseError {
    /// Character offset of the offending token (end of input for unclosed constructs).
    pub position: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmilesError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("cannot canonicalize an invalid molecule: {0}")]
pub struct CanonError(pub ValidityResult);
