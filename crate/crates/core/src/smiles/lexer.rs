use std::fmt;

use super::error::{LexError, LexErrorKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    OrganicAtom,
    BracketAtom,
    Bond,
    RingClosure,
    BranchOpen,
    BranchClose,
    Dot,
}

/// One lexical unit of a SMILES string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// 0-based character offset of the first character.
    pub position: usize,
}

impl Token {
    /// Ring label for a ring-closure token (`1`, `%12`).
    pub fn ring_label(&self) -> Option<u8> {
        if self.kind != TokenKind::RingClosure {
            return None;
        }
        self.text.trim_start_matches('%').parse().ok()
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// Splits a SMILES string into tokens.
///
/// The lexer only enforces the character alphabet, bracket termination and
/// `%nn` ring labels. Structural problems such as unbalanced branches are
/// reported by the parser.
pub fn tokenize(smiles: &str) -> Result<Vec<Token>, LexError> {
    let chars: Vec<char> = smiles.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let kind = match c {
            'B' | 'C' => {
                let two = matches!((c, chars.get(i + 1)), ('B', Some('r')) | ('C', Some('l')));
                i += if two { 2 } else { 1 };
                TokenKind::OrganicAtom
            }
            'N' | 'O' | 'P' | 'S' | 'F' | 'I' | 'b' | 'c' | 'n' | 'o' | 'p' | 's' | '*' => {
                i += 1;
                TokenKind::OrganicAtom
            }
            '[' => {
                let close = chars[i + 1..]
                    .iter()
                    .position(|&ch| ch == ']' || ch == '[')
                    .map(|off| i + 1 + off);
                match close {
                    Some(j) if chars[j] == ']' => {
                        if let Some(bad) = chars[i + 1..j].iter().position(|ch| !ch.is_ascii_graphic()) {
                            return Err(LexError {
                                position: i + 1 + bad,
                                kind: LexErrorKind::UnexpectedChar(chars[i + 1 + bad]),
                            });
                        }
                        i = j + 1;
                    }
                    _ => {
                        return Err(LexError {
                            position: start,
                            kind: LexErrorKind::UnterminatedBracket,
                        })
                    }
                }
                TokenKind::BracketAtom
            }
            '-' | '=' | '#' | '$' | ':' | '/' | '\\' => {
                i += 1;
                TokenKind::Bond
            }
            '0'..='9' => {
                i += 1;
                TokenKind::RingClosure
            }
            '%' => {
                let ok = chars.get(i + 1).is_some_and(|ch| ch.is_ascii_digit())
                    && chars.get(i + 2).is_some_and(|ch| ch.is_ascii_digit());
                if !ok {
                    return Err(LexError {
                        position: start,
                        kind: LexErrorKind::BadRingLabel,
                    });
                }
                i += 3;
                TokenKind::RingClosure
            }
            '(' => {
                i += 1;
                TokenKind::BranchOpen
            }
            ')' => {
                i += 1;
                TokenKind::BranchClose
            }
            '.' => {
                i += 1;
                TokenKind::Dot
            }
            other => {
                return Err(LexError {
                    position: start,
                    kind: LexErrorKind::UnexpectedChar(other),
                })
            }
        };
        tokens.push(Token {
            kind,
            text: chars[start..i].iter().collect(),
            position: start,
        });
    }
    Ok(tokens)
}
