use std::collections::HashMap;

use super::element::Element;
use super::error::{ParseError, ParseErrorKind};
use super::lexer::{Token, TokenKind};
use super::molecule::{Atom, Bond, BondOrder, BondStereo, Chirality, Molecule, NeighborRef};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct BondSymbol {
    order: BondOrder,
    stereo: BondStereo,
}

fn bond_symbol(token: &Token) -> Result<BondSymbol, ParseError> {
    let (order, stereo) = match token.text.as_str() {
        "-" => (BondOrder::Single, BondStereo::None),
        "=" => (BondOrder::Double, BondStereo::None),
        "#" => (BondOrder::Triple, BondStereo::None),
        ":" => (BondOrder::Aromatic, BondStereo::None),
        "/" => (BondOrder::Single, BondStereo::Up),
        "\\" => (BondOrder::Single, BondStereo::Down),
        other => {
            return Err(ParseError {
                position: token.position,
                kind: ParseErrorKind::UnsupportedBond(other.to_string()),
            })
        }
    };
    Ok(BondSymbol { order, stereo })
}

struct OpenRing {
    atom: usize,
    symbol: Option<BondSymbol>,
    /// Index into the opener's written neighbour list holding the placeholder.
    slot: usize,
}

#[derive(Default)]
struct Builder {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    written: Vec<Vec<Option<NeighborRef>>>,
    bond_index: HashMap<(usize, usize), usize>,
}

impl Builder {
    fn add_bond(
        &mut self,
        from: usize,
        to: usize,
        symbol: Option<BondSymbol>,
        position: usize,
    ) -> Result<(), ParseError> {
        let err = |kind| ParseError { position, kind };
        if from == to {
            return Err(err(ParseErrorKind::SelfBond));
        }
        let key = (from.min(to), from.max(to));
        if self.bond_index.contains_key(&key) {
            return Err(err(ParseErrorKind::DuplicateBond));
        }
        let both_aromatic = self.atoms[from].aromatic && self.atoms[to].aromatic;
        let symbol = symbol.unwrap_or(BondSymbol {
            order: if both_aromatic {
                BondOrder::Aromatic
            } else {
                BondOrder::Single
            },
            stereo: BondStereo::None,
        });
        if symbol.order == BondOrder::Aromatic && !both_aromatic {
            return Err(err(ParseErrorKind::AromaticBondOnAliphaticAtom));
        }
        self.bond_index.insert(key, self.bonds.len());
        self.bonds.push(Bond {
            a: from,
            b: to,
            order: symbol.order,
            stereo: symbol.stereo,
        });
        Ok(())
    }
}

/// Builds a molecular graph from a token sequence.
pub fn parse(tokens: &[Token]) -> Result<Molecule, ParseError> {
    if tokens.is_empty() {
        return Err(ParseError {
            position: 0,
            kind: ParseErrorKind::Empty,
        });
    }
    let end = tokens
        .last()
        .map(|t| t.position + t.text.chars().count())
        .unwrap_or(0);
    let mut b = Builder::default();
    let mut prev: Option<usize> = None;
    let mut pending: Option<(BondSymbol, usize)> = None;
    let mut branches: Vec<(usize, usize)> = Vec::new();
    let mut rings: HashMap<u8, OpenRing> = HashMap::new();
    // position of the last `(` not yet followed by an atom
    let mut fresh_branch: Option<usize> = None;
    let mut after_dot: Option<usize> = None;

    for token in tokens {
        let err = |kind| ParseError {
            position: token.position,
            kind,
        };
        match token.kind {
            TokenKind::OrganicAtom | TokenKind::BracketAtom => {
                let atom = if token.kind == TokenKind::OrganicAtom {
                    organic_atom(token)?
                } else {
                    parse_bracket(token)?
                };
                let idx = b.atoms.len();
                let mut written = Vec::new();
                if let Some(p) = prev {
                    written.push(Some(NeighborRef::Atom(p)));
                }
                if atom.explicit_h.unwrap_or(0) > 0 && atom.chirality.is_some() {
                    written.push(Some(NeighborRef::ImplicitH));
                }
                b.atoms.push(atom);
                b.written.push(written);
                match prev {
                    Some(p) => {
                        let symbol = pending.take().map(|(s, _)| s);
                        b.add_bond(p, idx, symbol, token.position)?;
                        b.written[p].push(Some(NeighborRef::Atom(idx)));
                    }
                    None => {
                        if let Some((_, pos)) = pending {
                            return Err(ParseError {
                                position: pos,
                                kind: ParseErrorKind::BondWithoutAtom,
                            });
                        }
                    }
                }
                prev = Some(idx);
                fresh_branch = None;
                after_dot = None;
            }
            TokenKind::Bond => {
                if pending.is_some() || prev.is_none() {
                    return Err(err(ParseErrorKind::BondWithoutAtom));
                }
                pending = Some((bond_symbol(token)?, token.position));
            }
            TokenKind::RingClosure => {
                let Some(atom) = prev else {
                    return Err(err(ParseErrorKind::RingClosureWithoutAtom));
                };
                if fresh_branch.is_some() {
                    return Err(err(ParseErrorKind::RingClosureWithoutAtom));
                }
                let label = token.ring_label().expect("lexer validated ring label");
                let symbol = pending.take().map(|(s, _)| s);
                match rings.remove(&label) {
                    Some(open) => {
                        let symbol = match (open.symbol, symbol) {
                            (Some(a), Some(c)) => {
                                // closing-side markers are written closer -> opener
                                let c_as_open = BondSymbol {
                                    order: c.order,
                                    stereo: c.stereo.flipped(),
                                };
                                if a != c_as_open {
                                    return Err(err(ParseErrorKind::ConflictingRingBond(label)));
                                }
                                Some(a)
                            }
                            (Some(a), None) => Some(a),
                            (None, Some(c)) => Some(BondSymbol {
                                order: c.order,
                                stereo: c.stereo.flipped(),
                            }),
                            (None, None) => None,
                        };
                        b.add_bond(open.atom, atom, symbol, token.position)?;
                        b.written[open.atom][open.slot] = Some(NeighborRef::Atom(atom));
                        b.written[atom].push(Some(NeighborRef::Atom(open.atom)));
                    }
                    None => {
                        let slot = b.written[atom].len();
                        b.written[atom].push(None);
                        rings.insert(label, OpenRing { atom, symbol, slot });
                    }
                }
            }
            TokenKind::BranchOpen => {
                let Some(atom) = prev else {
                    return Err(err(ParseErrorKind::UnbalancedBranch));
                };
                if let Some((_, pos)) = pending {
                    return Err(ParseError {
                        position: pos,
                        kind: ParseErrorKind::BondWithoutAtom,
                    });
                }
                if fresh_branch.is_some() {
                    return Err(err(ParseErrorKind::EmptyBranch));
                }
                branches.push((atom, token.position));
                fresh_branch = Some(token.position);
            }
            TokenKind::BranchClose => {
                if let Some((_, pos)) = pending {
                    return Err(ParseError {
                        position: pos,
                        kind: ParseErrorKind::BondWithoutAtom,
                    });
                }
                if fresh_branch.is_some() {
                    return Err(err(ParseErrorKind::EmptyBranch));
                }
                if after_dot.is_some() {
                    return Err(err(ParseErrorKind::DanglingDot));
                }
                let Some((atom, _)) = branches.pop() else {
                    return Err(err(ParseErrorKind::UnbalancedBranch));
                };
                prev = Some(atom);
            }
            TokenKind::Dot => {
                if prev.is_none() || pending.is_some() || fresh_branch.is_some() {
                    return Err(err(ParseErrorKind::DanglingDot));
                }
                prev = None;
                after_dot = Some(token.position);
            }
        }
    }

    if let Some((_, pos)) = pending {
        return Err(ParseError {
            position: pos,
            kind: ParseErrorKind::BondWithoutAtom,
        });
    }
    if let Some(pos) = after_dot {
        return Err(ParseError {
            position: pos,
            kind: ParseErrorKind::DanglingDot,
        });
    }
    if let Some(&(_, pos)) = branches.last() {
        return Err(ParseError {
            position: pos,
            kind: ParseErrorKind::UnbalancedBranch,
        });
    }
    if let Some(label) = rings.keys().min() {
        return Err(ParseError {
            position: end,
            kind: ParseErrorKind::UnclosedRing(*label),
        });
    }

    let written = b
        .written
        .into_iter()
        .map(|slots| slots.into_iter().map(|s| s.expect("ring slots filled")).collect())
        .collect();
    Ok(Molecule::assemble(b.atoms, b.bonds, written))
}

fn organic_atom(token: &Token) -> Result<Atom, ParseError> {
    let text = token.text.as_str();
    let (symbol, aromatic) = match text {
        "*" => ("*", false),
        "b" | "c" | "n" | "o" | "p" | "s" => (text, true),
        _ => (text, false),
    };
    let symbol = if aromatic {
        symbol.to_ascii_uppercase()
    } else {
        symbol.to_string()
    };
    let element = Element::from_symbol(&symbol).ok_or_else(|| ParseError {
        position: token.position,
        kind: ParseErrorKind::UnknownElement(symbol.clone()),
    })?;
    Ok(Atom::new(element, aromatic))
}

/// `[` isotope? symbol chirality? hcount? charge? class? `]`
fn parse_bracket(token: &Token) -> Result<Atom, ParseError> {
    let inner: Vec<char> = token.text[1..token.text.len() - 1].chars().collect();
    let bad = |msg: &str| ParseError {
        position: token.position,
        kind: ParseErrorKind::BadBracketAtom(format!("{}: {}", token.text, msg)),
    };
    let mut i = 0;

    let digits = |i: &mut usize| -> Option<u32> {
        let start = *i;
        while *i < inner.len() && inner[*i].is_ascii_digit() {
            *i += 1;
        }
        (start < *i).then(|| inner[start..*i].iter().collect::<String>().parse().ok())?
    };

    let isotope = match digits(&mut i) {
        Some(v) if v <= u16::MAX as u32 => Some(v as u16),
        Some(_) => return Err(bad("isotope out of range")),
        None => None,
    };

    let (element, aromatic) = {
        let rest: String = inner[i..].iter().collect();
        if rest.starts_with('*') {
            i += 1;
            (Element::WILDCARD, false)
        } else if let Some(sym) = ["se", "as", "b", "c", "n", "o", "p", "s"]
            .iter()
            .find(|s| rest.starts_with(*s))
        {
            i += sym.len();
            let upper = format!("{}{}", sym[..1].to_ascii_uppercase(), &sym[1..]);
            (Element::from_symbol(&upper).expect("aromatic symbol is an element"), true)
        } else {
            let first = inner.get(i).copied().filter(|c| c.is_ascii_uppercase());
            let Some(first) = first else {
                return Err(bad("missing element symbol"));
            };
            let two = inner
                .get(i + 1)
                .filter(|c| c.is_ascii_lowercase())
                .map(|c| format!("{first}{c}"))
                .and_then(|s| Element::from_symbol(&s));
            match two {
                Some(e) => {
                    i += 2;
                    (e, false)
                }
                None => {
                    let e = Element::from_symbol(&first.to_string()).ok_or_else(|| ParseError {
                        position: token.position,
                        kind: ParseErrorKind::UnknownElement(first.to_string()),
                    })?;
                    i += 1;
                    (e, false)
                }
            }
        }
    };

    let chirality = if inner.get(i) == Some(&'@') {
        i += 1;
        if inner.get(i) == Some(&'@') {
            i += 1;
            Some(Chirality::Clockwise)
        } else {
            Some(Chirality::CounterClockwise)
        }
    } else {
        None
    };
    if inner.get(i).is_some_and(|c| c.is_ascii_uppercase() && *c != 'H' || *c == '@') {
        return Err(bad("unsupported chirality class"));
    }

    let mut hydrogens = 0u8;
    if inner.get(i) == Some(&'H') {
        i += 1;
        hydrogens = match digits(&mut i) {
            Some(v) if v <= 9 => v as u8,
            Some(_) => return Err(bad("hydrogen count out of range")),
            None => 1,
        };
    }

    let mut charge: i32 = 0;
    if let Some(&sign @ ('+' | '-')) = inner.get(i) {
        let unit = if sign == '+' { 1 } else { -1 };
        i += 1;
        if let Some(v) = digits(&mut i) {
            charge = unit * v as i32;
        } else {
            charge = unit;
            while inner.get(i) == Some(&sign) {
                charge += unit;
                i += 1;
            }
        }
        if charge.abs() > 15 {
            return Err(bad("charge out of range"));
        }
    }

    if inner.get(i) == Some(&':') {
        i += 1;
        if digits(&mut i).is_none() {
            return Err(bad("atom class needs digits"));
        }
    }
    if i != inner.len() {
        return Err(bad("trailing characters"));
    }

    let mut atom = Atom::new(element, aromatic);
    atom.isotope = isotope;
    atom.chirality = chirality;
    atom.explicit_h = Some(hydrogens);
    atom.charge = charge as i8;
    Ok(atom)
}
