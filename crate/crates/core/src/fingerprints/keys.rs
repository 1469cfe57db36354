//! Substructure-key fingerprints driven by a small pattern language.
//!
//! A key table has one key per line: `id<TAB>threshold<TAB>pattern`. Blank
//! lines and lines starting with `#` are ignored. Bit `id - 1` is set when the
//! pattern matches at least `threshold` distinct atom sets.
//!
//! Patterns come in three forms:
//!
//! * trees of bracketed atoms joined by bonds, with `(...)` branches, e.g.
//!   `[O]~[C](~[N])~[C]`. Atom primitives: element symbol (either
//!   aromaticity), lowercase symbol (aromatic only), `#n`, `#n-m`, `*`, `A`,
//!   `a`, `X` (halogen), `Q` (neither C nor H), `R` (in ring), `Rn` (ring-bond
//!   count), `Dn` (degree), `Hn` (total H), `+n`/`-n`/`+0`, `iso`, each
//!   optionally negated with `!`. `,` is OR and binds tighter than `;` (AND).
//!   Bond primitives `- = # : ~ @` may be negated with `!` and are ANDed when
//!   written together; an omitted bond matches anything.
//! * `ring(n)`, `ring(n-m)` with optional `,arom` and `,hetero` flags, counting
//!   simple cycles of the given size.
//! * `frag`, counting connected components.

use std::collections::HashSet;

use super::{ensure_valid, BitFingerprint, FingerprintError, Scheme};
use crate::smiles::{BondOrder, Element, Molecule};

const MAX_RING_SIZE: usize = 12;

/// The bundled 166-key table.
pub const DEFAULT_KEYS: &str = include_str!("../../data/maccs_keys.tsv");

#[derive(Debug, Clone, PartialEq)]
enum AtomPrim {
    Any,
    Element(u8),
    AromaticElement(u8),
    AtomicRange(u8, u8),
    Aliphatic,
    Aromatic,
    Halogen,
    Hetero,
    InRing,
    RingBonds(u8),
    Degree(u8),
    Hydrogens(u8),
    Charge(i8),
    Isotope,
}

/// Conjunction of disjunctions of (negated?, primitive).
#[derive(Debug, Clone, PartialEq)]
pub struct AtomExpr(Vec<Vec<(bool, AtomPrim)>>);

#[derive(Debug, Clone, Copy, PartialEq)]
enum BondPrim {
    Single,
    Double,
    Triple,
    Aromatic,
    Any,
    Ring,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BondExpr(Vec<(bool, BondPrim)>);

/// A compiled key pattern.
#[derive(Debug, Clone, PartialEq)]
pub enum Pattern {
    /// Atoms in depth-first order; each non-root atom names its parent.
    Tree {
        atoms: Vec<AtomExpr>,
        parents: Vec<Option<(usize, BondExpr)>>,
    },
    Ring {
        min: usize,
        max: usize,
        aromatic: bool,
        hetero: bool,
    },
    Fragments,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeyDefinition {
    pub id: usize,
    pub threshold: usize,
    pub source: String,
    pub pattern: Pattern,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KeyTable {
    keys: Vec<KeyDefinition>,
    nbits: usize,
}

impl KeyTable {
    pub fn parse(text: &str) -> Result<KeyTable, FingerprintError> {
        let mut keys = Vec::new();
        let mut seen = HashSet::new();
        for (lineno, line) in text.lines().enumerate() {
            let line_no = lineno + 1;
            let err = |message: String| FingerprintError::KeyTable { line: line_no, message };
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split('\t').collect();
            if fields.len() != 3 {
                return Err(err(format!("expected 3 tab-separated fields, found {}", fields.len())));
            }
            let id: usize = fields[0]
                .trim()
                .parse()
                .map_err(|_| err(format!("bad key id `{}`", fields[0])))?;
            if id == 0 {
                return Err(err("key ids start at 1".into()));
            }
            if !seen.insert(id) {
                return Err(err(format!("duplicate key id {id}")));
            }
            let threshold: usize = fields[1]
                .trim()
                .parse()
                .map_err(|_| err(format!("bad threshold `{}`", fields[1])))?;
            if threshold == 0 {
                return Err(err("threshold must be at least 1".into()));
            }
            let source = fields[2].trim().to_string();
            let pattern = parse_pattern(&source).map_err(err)?;
            keys.push(KeyDefinition { id, threshold, source, pattern });
        }
        let nbits = keys.iter().map(|k| k.id).max().ok_or(FingerprintError::EmptyKeyTable)?;
        Ok(KeyTable { keys, nbits })
    }

    /// The bundled MACCS-style table.
    pub fn default_table() -> KeyTable {
        KeyTable::parse(DEFAULT_KEYS).expect("bundled key table parses")
    }

    pub fn keys(&self) -> &[KeyDefinition] {
        &self.keys
    }

    pub fn nbits(&self) -> usize {
        self.nbits
    }

    pub fn key(&self, id: usize) -> Option<&KeyDefinition> {
        self.keys.iter().find(|k| k.id == id)
    }
}

impl KeyDefinition {
    /// Number of distinct matched atom sets, stopping early at `limit`.
    pub fn count_matches(&self, mol: &Molecule, limit: usize) -> usize {
        match &self.pattern {
            Pattern::Fragments => mol.fragment_count(),
            Pattern::Ring { min, max, aromatic, hetero } => {
                count_rings(mol, *min, *max, *aromatic, *hetero, limit)
            }
            Pattern::Tree { atoms, parents } => count_embeddings(mol, atoms, parents, limit),
        }
    }

    pub fn matches(&self, mol: &Molecule) -> bool {
        self.count_matches(mol, self.threshold) >= self.threshold
    }
}

pub fn key_fingerprint(mol: &Molecule, table: &KeyTable) -> Result<BitFingerprint, FingerprintError> {
    ensure_valid(mol)?;
    let mut fp = BitFingerprint::new(Scheme::Keys, table.nbits)?;
    for key in &table.keys {
        if key.matches(mol) {
            fp.set(key.id - 1);
        }
    }
    Ok(fp)
}

// ---------------------------------------------------------------- parsing

fn parse_pattern(src: &str) -> Result<Pattern, String> {
    if src == "frag" {
        return Ok(Pattern::Fragments);
    }
    if let Some(inner) = src.strip_prefix("ring(").and_then(|s| s.strip_suffix(')')) {
        return parse_ring(inner);
    }
    parse_tree(src)
}

fn parse_ring(inner: &str) -> Result<Pattern, String> {
    let mut parts = inner.split(',').map(str::trim);
    let size = parts.next().unwrap_or_default();
    let (min, max) = match size.split_once('-') {
        Some((a, b)) => (parse_num(a)?, parse_num(b)?),
        None => {
            let n = parse_num(size)?;
            (n, n)
        }
    };
    if min < 3 || max < min || max > MAX_RING_SIZE {
        return Err(format!("ring size `{size}` outside 3..={MAX_RING_SIZE}"));
    }
    let (mut aromatic, mut hetero) = (false, false);
    for flag in parts {
        match flag {
            "arom" => aromatic = true,
            "hetero" => hetero = true,
            other => return Err(format!("unknown ring flag `{other}`")),
        }
    }
    Ok(Pattern::Ring { min, max, aromatic, hetero })
}

fn parse_num<T: std::str::FromStr>(s: &str) -> Result<T, String> {
    s.parse().map_err(|_| format!("bad number `{s}`"))
}

fn parse_tree(src: &str) -> Result<Pattern, String> {
    let chars: Vec<char> = src.chars().collect();
    let mut atoms = Vec::new();
    let mut parents: Vec<Option<(usize, BondExpr)>> = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    let mut prev: Option<usize> = None;
    let mut bond: Vec<(bool, BondPrim)> = Vec::new();
    let mut negate = false;
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            '[' => {
                let close = chars[i..]
                    .iter()
                    .position(|&x| x == ']')
                    .ok_or_else(|| "unterminated `[`".to_string())?;
                let body: String = chars[i + 1..i + close].iter().collect();
                if negate {
                    return Err("`!` must precede a bond primitive".into());
                }
                if prev.is_none() && !atoms.is_empty() {
                    return Err("atom without attachment point".into());
                }
                atoms.push(parse_atom_expr(&body)?);
                parents.push(prev.map(|p| (p, BondExpr(std::mem::take(&mut bond)))));
                prev = Some(atoms.len() - 1);
                i += close + 1;
                continue;
            }
            '(' => {
                let p = prev.ok_or("branch before any atom")?;
                if !bond.is_empty() || negate {
                    return Err("bond before `(`".into());
                }
                stack.push(p);
            }
            ')' => {
                if !bond.is_empty() || negate {
                    return Err("dangling bond before `)`".into());
                }
                prev = Some(stack.pop().ok_or("unbalanced `)`")?);
            }
            '!' => {
                if negate {
                    return Err("double negation".into());
                }
                negate = true;
            }
            '-' | '=' | '#' | ':' | '~' | '@' => {
                if prev.is_none() {
                    return Err("bond before any atom".into());
                }
                let prim = match c {
                    '-' => BondPrim::Single,
                    '=' => BondPrim::Double,
                    '#' => BondPrim::Triple,
                    ':' => BondPrim::Aromatic,
                    '~' => BondPrim::Any,
                    _ => BondPrim::Ring,
                };
                bond.push((std::mem::take(&mut negate), prim));
            }
            c if c.is_whitespace() => {}
            other => return Err(format!("unexpected `{other}`")),
        }
        i += 1;
    }
    if atoms.is_empty() {
        return Err("empty pattern".into());
    }
    if !stack.is_empty() {
        return Err("unbalanced `(`".into());
    }
    if !bond.is_empty() || negate {
        return Err("trailing bond".into());
    }
    Ok(Pattern::Tree { atoms, parents })
}

fn parse_atom_expr(body: &str) -> Result<AtomExpr, String> {
    if body.is_empty() {
        return Err("empty atom `[]`".into());
    }
    let mut and = Vec::new();
    for term in body.split(';') {
        let mut or = Vec::new();
        for prim in term.split(',') {
            let (neg, rest) = match prim.strip_prefix('!') {
                Some(r) => (true, r),
                None => (false, prim),
            };
            or.push((neg, parse_atom_prim(rest)?));
        }
        and.push(or);
    }
    Ok(AtomExpr(and))
}

fn parse_atom_prim(s: &str) -> Result<AtomPrim, String> {
    let bad = || format!("unknown atom primitive `{s}`");
    let number_after = |prefix: char| -> Option<u8> {
        let rest = s.strip_prefix(prefix)?;
        (!rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
            .then(|| rest.parse().ok())
            .flatten()
    };
    match s {
        "*" => return Ok(AtomPrim::Any),
        "A" => return Ok(AtomPrim::Aliphatic),
        "a" => return Ok(AtomPrim::Aromatic),
        "X" => return Ok(AtomPrim::Halogen),
        "Q" => return Ok(AtomPrim::Hetero),
        "R" => return Ok(AtomPrim::InRing),
        "iso" => return Ok(AtomPrim::Isotope),
        "+" => return Ok(AtomPrim::Charge(1)),
        "-" => return Ok(AtomPrim::Charge(-1)),
        _ => {}
    }
    if let Some(rest) = s.strip_prefix('#') {
        return match rest.split_once('-') {
            Some((a, b)) => Ok(AtomPrim::AtomicRange(parse_num(a)?, parse_num(b)?)),
            None => {
                let z: u8 = parse_num(rest)?;
                Ok(AtomPrim::AtomicRange(z, z))
            }
        };
    }
    if let Some(rest) = s.strip_prefix('+') {
        return Ok(AtomPrim::Charge(parse_num(rest)?));
    }
    if let Some(rest) = s.strip_prefix('-') {
        let n: i8 = parse_num(rest)?;
        return Ok(AtomPrim::Charge(-n));
    }
    if let Some(n) = number_after('R') {
        return Ok(AtomPrim::RingBonds(n));
    }
    if let Some(n) = number_after('D') {
        return Ok(AtomPrim::Degree(n));
    }
    if let Some(n) = number_after('H') {
        return Ok(AtomPrim::Hydrogens(n));
    }
    if s.chars().next().is_some_and(|c| c.is_ascii_lowercase()) {
        let mut cap = s.to_string();
        cap[..1].make_ascii_uppercase();
        let e = Element::from_symbol(&cap).filter(|e| e.can_be_aromatic()).ok_or_else(bad)?;
        return Ok(AtomPrim::AromaticElement(e.atomic_number()));
    }
    let e = Element::from_symbol(s).filter(|e| e.atomic_number() > 0).ok_or_else(bad)?;
    Ok(AtomPrim::Element(e.atomic_number()))
}

// --------------------------------------------------------------- matching

fn atom_prim_matches(mol: &Molecule, i: usize, prim: &AtomPrim) -> bool {
    let a = mol.atom(i);
    let z = a.element.atomic_number();
    match *prim {
        AtomPrim::Any => true,
        AtomPrim::Element(e) => z == e,
        AtomPrim::AromaticElement(e) => z == e && a.aromatic,
        AtomPrim::AtomicRange(lo, hi) => (lo..=hi).contains(&z),
        AtomPrim::Aliphatic => !a.aromatic,
        AtomPrim::Aromatic => a.aromatic,
        AtomPrim::Halogen => a.element.is_halogen(),
        AtomPrim::Hetero => z != 6 && z != 1,
        AtomPrim::InRing => mol.in_ring(i),
        AtomPrim::RingBonds(n) => mol.ring_bond_count(i) == n as usize,
        AtomPrim::Degree(n) => mol.degree(i) == n as usize,
        AtomPrim::Hydrogens(n) => a.hydrogens() == n,
        AtomPrim::Charge(c) => a.charge == c,
        AtomPrim::Isotope => a.isotope.is_some(),
    }
}

fn atom_matches(mol: &Molecule, i: usize, expr: &AtomExpr) -> bool {
    expr.0.iter().all(|or| {
        or.iter()
            .any(|(neg, prim)| atom_prim_matches(mol, i, prim) != *neg)
    })
}

fn bond_matches(mol: &Molecule, b: usize, expr: &BondExpr) -> bool {
    let order = mol.bond(b).order;
    expr.0.iter().all(|&(neg, prim)| {
        let hit = match prim {
            BondPrim::Single => order == BondOrder::Single,
            BondPrim::Double => order == BondOrder::Double,
            BondPrim::Triple => order == BondOrder::Triple,
            BondPrim::Aromatic => order == BondOrder::Aromatic,
            BondPrim::Any => true,
            BondPrim::Ring => mol.is_ring_bond(b),
        };
        hit != neg
    })
}

fn count_embeddings(
    mol: &Molecule,
    atoms: &[AtomExpr],
    parents: &[Option<(usize, BondExpr)>],
    limit: usize,
) -> usize {
    struct Search<'a> {
        mol: &'a Molecule,
        atoms: &'a [AtomExpr],
        parents: &'a [Option<(usize, BondExpr)>],
        map: Vec<usize>,
        used: Vec<bool>,
        found: HashSet<Vec<usize>>,
        limit: usize,
    }

    impl Search<'_> {
        fn go(&mut self, k: usize) {
            if self.found.len() >= self.limit {
                return;
            }
            if k == self.atoms.len() {
                let mut set = self.map.clone();
                set.sort_unstable();
                self.found.insert(set);
                return;
            }
            let candidates: Vec<usize> = match &self.parents[k] {
                None => (0..self.mol.atom_count()).collect(),
                Some((p, bond)) => self
                    .mol
                    .neighbors(self.map[*p])
                    .iter()
                    .filter(|&&(_, b)| bond_matches(self.mol, b, bond))
                    .map(|&(nb, _)| nb)
                    .collect(),
            };
            for c in candidates {
                if self.used[c] || !atom_matches(self.mol, c, &self.atoms[k]) {
                    continue;
                }
                self.used[c] = true;
                self.map.push(c);
                self.go(k + 1);
                self.map.pop();
                self.used[c] = false;
            }
        }
    }

    let mut s = Search {
        mol,
        atoms,
        parents,
        map: Vec::with_capacity(atoms.len()),
        used: vec![false; mol.atom_count()],
        found: HashSet::new(),
        limit,
    };
    s.go(0);
    s.found.len()
}

fn count_rings(mol: &Molecule, min: usize, max: usize, aromatic: bool, hetero: bool, limit: usize) -> usize {
    let mut found: HashSet<Vec<usize>> = HashSet::new();
    let n = mol.atom_count();
    let mut path = Vec::new();
    let mut bonds = Vec::new();
    let mut on = vec![false; n];
    for start in 0..n {
        if !mol.in_ring(start) {
            continue;
        }
        path.push(start);
        on[start] = true;
        walk_cycles(mol, start, max, &mut path, &mut bonds, &mut on, &mut |cycle, cbonds| {
            if cycle.len() < min {
                return;
            }
            if aromatic
                && !(cycle.iter().all(|&a| mol.atom(a).aromatic)
                    && cbonds.iter().all(|&b| mol.bond(b).order == BondOrder::Aromatic))
            {
                return;
            }
            if hetero
                && !cycle
                    .iter()
                    .any(|&a| !matches!(mol.atom(a).element.atomic_number(), 1 | 6))
            {
                return;
            }
            let mut key = cycle.to_vec();
            key.sort_unstable();
            found.insert(key);
        });
        on[start] = false;
        path.pop();
        if found.len() >= limit {
            break;
        }
    }
    found.len()
}

/// Enumerates simple cycles through `start` whose other atoms all have a
/// larger index, so each cycle is reported from its smallest atom only.
fn walk_cycles(
    mol: &Molecule,
    start: usize,
    max: usize,
    path: &mut Vec<usize>,
    bonds: &mut Vec<usize>,
    on: &mut [bool],
    emit: &mut dyn FnMut(&[usize], &[usize]),
) {
    let last = *path.last().expect("non-empty path");
    for &(nb, b) in mol.neighbors(last) {
        if !mol.is_ring_bond(b) {
            continue;
        }
        if nb == start && path.len() >= 3 && bonds.first() != Some(&b) {
            bonds.push(b);
            emit(path, bonds);
            bonds.pop();
            continue;
        }
        if nb <= start || on[nb] || path.len() == max {
            continue;
        }
        on[nb] = true;
        path.push(nb);
        bonds.push(b);
        walk_cycles(mol, start, max, path, bonds, on, emit);
        bonds.pop();
        path.pop();
        on[nb] = false;
    }
}
