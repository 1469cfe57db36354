//! Canonical SMILES generation.
//!
//! Atoms are ranked by iterative refinement of local invariants (degree,
//! element, isotope, charge, hydrogens, aromaticity, ring bonds) using the
//! sorted ranks of their neighbours. Remaining ties are split by
//! individualising an atom of the lowest tied class and refining again. When
//! the component contains rings or stereo annotations every candidate of the
//! tied class is tried and the lexicographically smallest string wins; on
//! acyclic, stereo-free components refinement classes are automorphism
//! orbits, so the first candidate suffices.
//!
//! Stereo markers are carried through as annotations only. They never
//! influence ranking; tetrahedral `@`/`@@` is re-expressed relative to the
//! emitted neighbour order and `/`/`\` markers are flipped when a bond is
//! written in the opposite direction.

use std::collections::{BTreeSet, HashMap};

use super::error::CanonError;
use super::molecule::{BondOrder, BondStereo, Chirality, Molecule, NeighborRef};
use super::validity::{default_implicit_hydrogens, validate};

/// Upper bound on tie-break leaves explored per component. Past it the
/// search commits to the first candidate at each remaining branch.
const LEAF_BUDGET: usize = 2048;

/// Deterministic canonical SMILES for a valid molecule.
///
/// Fragments are canonicalized independently and joined with `.` in
/// lexicographic order.
pub fn canonicalize(mol: &Molecule) -> Result<String, CanonError> {
    let validity = validate(mol);
    if !validity.valid {
        return Err(CanonError(validity));
    }
    let mut parts: Vec<String> = mol
        .components()
        .iter()
        .map(|atoms| Component::new(mol, atoms).canonical_string())
        .collect();
    parts.sort();
    Ok(parts.join("."))
}

/// Parses, validates and canonicalizes a SMILES string.
pub fn canonical_smiles(smiles: &str) -> Option<String> {
    let mol = super::parse_valid(smiles)?;
    canonicalize(&mol).ok()
}

/// Dense ranks (0-based) of `keys` in sorted order; equal keys share a rank.
fn dense_ranks<K: Ord>(keys: &[K]) -> Vec<u32> {
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    let mut ranks = vec![0u32; keys.len()];
    let mut rank = 0u32;
    for w in 0..order.len() {
        if w > 0 && keys[order[w]] != keys[order[w - 1]] {
            rank += 1;
        }
        ranks[order[w]] = rank;
    }
    ranks
}

fn class_count(ranks: &[u32]) -> usize {
    ranks.iter().copied().max().map_or(0, |m| m as usize + 1)
}

struct Component<'a> {
    mol: &'a Molecule,
    /// local index -> global atom index
    atoms: Vec<usize>,
    /// local adjacency: (local neighbour, global bond index)
    adj: Vec<Vec<(usize, usize)>>,
    exhaustive: bool,
}

impl<'a> Component<'a> {
    fn new(mol: &'a Molecule, atoms: &[usize]) -> Component<'a> {
        let local: HashMap<usize, usize> = atoms.iter().enumerate().map(|(l, &g)| (g, l)).collect();
        let adj: Vec<Vec<(usize, usize)>> = atoms
            .iter()
            .map(|&g| {
                mol.neighbors(g)
                    .iter()
                    .map(|&(nb, b)| (local[&nb], b))
                    .collect()
            })
            .collect();
        let has_ring = atoms.iter().any(|&g| mol.in_ring(g));
        let has_stereo = atoms.iter().any(|&g| {
            mol.atom(g).chirality.is_some()
                || mol
                    .neighbors(g)
                    .iter()
                    .any(|&(_, b)| mol.bond(b).stereo != BondStereo::None)
        });
        Component {
            mol,
            atoms: atoms.to_vec(),
            adj,
            exhaustive: has_ring || has_stereo,
        }
    }

    fn initial_ranks(&self) -> Vec<u32> {
        let keys: Vec<_> = self
            .atoms
            .iter()
            .map(|&g| {
                let a = self.mol.atom(g);
                (
                    self.mol.degree(g),
                    a.element,
                    a.isotope.unwrap_or(0),
                    a.charge,
                    a.hydrogens(),
                    a.aromatic,
                    self.mol.ring_bond_count(g),
                )
            })
            .collect();
        dense_ranks(&keys)
    }

    fn refine(&self, mut ranks: Vec<u32>) -> Vec<u32> {
        loop {
            let before = class_count(&ranks);
            let keys: Vec<(u32, Vec<(u32, u8)>)> = (0..self.atoms.len())
                .map(|a| {
                    let mut env: Vec<(u32, u8)> = self.adj[a]
                        .iter()
                        .map(|&(nb, b)| (ranks[nb], self.mol.bond(b).order.code()))
                        .collect();
                    env.sort_unstable();
                    (ranks[a], env)
                })
                .collect();
            let next = dense_ranks(&keys);
            if class_count(&next) == before {
                return next;
            }
            ranks = next;
        }
    }

    fn individualize(&self, ranks: &[u32], chosen: usize) -> Vec<u32> {
        let keys: Vec<(u32, bool)> = ranks
            .iter()
            .enumerate()
            .map(|(a, &r)| (r, a != chosen))
            .collect();
        self.refine(dense_ranks(&keys))
    }

    fn canonical_string(&self) -> String {
        let ranks = self.refine(self.initial_ranks());
        let mut search = Search {
            best: None,
            leaves: 0,
        };
        self.explore(ranks, &mut search);
        search.best.expect("search visits at least one leaf")
    }

    fn explore(&self, ranks: Vec<u32>, search: &mut Search) {
        let n = self.atoms.len();
        if class_count(&ranks) == n {
            search.leaves += 1;
            let s = self.emit(&ranks);
            if search.best.as_ref().is_none_or(|b| s < *b) {
                search.best = Some(s);
            }
            return;
        }
        let mut counts = vec![0usize; n];
        for &r in &ranks {
            counts[r as usize] += 1;
        }
        let tied = counts.iter().position(|&c| c > 1).expect("some class is tied") as u32;
        let candidates: Vec<usize> = (0..n).filter(|&a| ranks[a] == tied).collect();
        for (k, &c) in candidates.iter().enumerate() {
            if k > 0 && (!self.exhaustive || search.leaves >= LEAF_BUDGET) {
                break;
            }
            let next = self.individualize(&ranks, c);
            self.explore(next, search);
        }
    }

    /// Writes the component with all ranks distinct.
    fn emit(&self, ranks: &[u32]) -> String {
        let n = self.atoms.len();
        let start = (0..n).min_by_key(|&a| ranks[a]).expect("component is non-empty");
        let mut tree = Tree {
            visited: vec![false; n],
            children: vec![Vec::new(); n],
            ring_open: vec![Vec::new(); n],
            ring_close: vec![Vec::new(); n],
            ring_seen: BTreeSet::new(),
        };
        self.span(start, None, ranks, &mut tree);
        let mut writer = Writer {
            out: String::new(),
            labels: HashMap::new(),
            free: BTreeSet::new(),
            next_label: 1,
        };
        self.write_atom(start, None, &tree, &mut writer);
        writer.out
    }

    fn span(&self, u: usize, parent_bond: Option<usize>, ranks: &[u32], tree: &mut Tree) {
        tree.visited[u] = true;
        let mut nbs = self.adj[u].clone();
        nbs.sort_by_key(|&(v, _)| ranks[v]);
        for (v, b) in nbs {
            if Some(b) == parent_bond {
                continue;
            }
            if tree.visited[v] {
                if tree.ring_seen.insert(b) {
                    tree.ring_open[v].push((u, b));
                    tree.ring_close[u].push((v, b));
                }
            } else {
                tree.children[u].push((v, b));
                self.span(v, Some(b), ranks, tree);
            }
        }
    }

    fn write_atom(&self, u: usize, parent: Option<(usize, usize)>, tree: &Tree, w: &mut Writer) {
        let g = self.atoms[u];
        let atom = self.mol.atom(g);

        if let Some((p, b)) = parent {
            w.out.push_str(bond_text(self.mol, b, self.atoms[p]));
        }

        let chirality = atom.chirality.map(|c| {
            let mut order = Vec::new();
            if let Some((p, _)) = parent {
                order.push(NeighborRef::Atom(self.atoms[p]));
            }
            if atom.hydrogens() > 0 {
                order.push(NeighborRef::ImplicitH);
            }
            for &(v, _) in tree.ring_close[u].iter().chain(&tree.ring_open[u]) {
                order.push(NeighborRef::Atom(self.atoms[v]));
            }
            for &(v, _) in &tree.children[u] {
                order.push(NeighborRef::Atom(self.atoms[v]));
            }
            reorient(c, self.mol.written_order(g), &order)
        });
        w.out.push_str(&atom_text(self.mol, g, chirality));

        let mut closed = Vec::new();
        for &(_, b) in &tree.ring_close[u] {
            let label = w.labels.remove(&b).expect("ring opened before closing");
            w.out.push_str(bond_text(self.mol, b, g));
            push_label(&mut w.out, label);
            closed.push(label);
        }
        for &(_, b) in &tree.ring_open[u] {
            let label = w.allocate();
            w.labels.insert(b, label);
            push_label(&mut w.out, label);
        }
        w.free.extend(closed);

        let children = &tree.children[u];
        for (k, &(v, b)) in children.iter().enumerate() {
            let last = k + 1 == children.len();
            if !last {
                w.out.push('(');
            }
            self.write_atom(v, Some((u, b)), tree, w);
            if !last {
                w.out.push(')');
            }
        }
    }
}

struct Search {
    best: Option<String>,
    leaves: usize,
}

struct Tree {
    visited: Vec<bool>,
    children: Vec<Vec<(usize, usize)>>,
    ring_open: Vec<Vec<(usize, usize)>>,
    ring_close: Vec<Vec<(usize, usize)>>,
    ring_seen: BTreeSet<usize>,
}

struct Writer {
    out: String,
    labels: HashMap<usize, u32>,
    free: BTreeSet<u32>,
    next_label: u32,
}

impl Writer {
    fn allocate(&mut self) -> u32 {
        if let Some(&l) = self.free.iter().next() {
            self.free.remove(&l);
            return l;
        }
        let l = self.next_label;
        self.next_label += 1;
        l
    }
}

fn push_label(out: &mut String, label: u32) {
    if label < 10 {
        out.push_str(&label.to_string());
    } else {
        out.push_str(&format!("%{label:02}"));
    }
}

fn bond_text(mol: &Molecule, bond: usize, from: usize) -> &'static str {
    let b = mol.bond(bond);
    match b.order {
        BondOrder::Aromatic => "",
        BondOrder::Double => "=",
        BondOrder::Triple => "#",
        BondOrder::Single => match b.stereo_from(from) {
            BondStereo::Up => "/",
            BondStereo::Down => "\\",
            BondStereo::None => {
                if mol.atom(b.a).aromatic && mol.atom(b.b).aromatic {
                    "-"
                } else {
                    ""
                }
            }
        },
    }
}

/// Re-expresses a chirality tag written against `original` neighbour order for
/// the `emitted` order: an odd permutation inverts it.
fn reorient(tag: Chirality, original: &[NeighborRef], emitted: &[NeighborRef]) -> Chirality {
    if original.len() != emitted.len() {
        return tag;
    }
    let positions: Option<Vec<usize>> = emitted
        .iter()
        .map(|r| original.iter().position(|o| o == r))
        .collect();
    let Some(positions) = positions else {
        return tag;
    };
    let mut inversions = 0;
    for i in 0..positions.len() {
        for j in i + 1..positions.len() {
            if positions[i] > positions[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 1 {
        tag.inverted()
    } else {
        tag
    }
}

fn atom_text(mol: &Molecule, g: usize, chirality: Option<Chirality>) -> String {
    let atom = mol.atom(g);
    let symbol = if atom.aromatic {
        atom.element.symbol().to_ascii_lowercase()
    } else {
        atom.element.symbol().to_string()
    };
    let organic = atom.element.is_organic_subset() || atom.element.atomic_number() == 0;
    let implied = default_implicit_hydrogens(atom.element, atom.aromatic, mol.bond_order_sum(g));
    if organic
        && atom.charge == 0
        && atom.isotope.is_none()
        && chirality.is_none()
        && atom.hydrogens() == implied
    {
        return symbol;
    }
    let mut s = String::from("[");
    if let Some(iso) = atom.isotope {
        s.push_str(&iso.to_string());
    }
    s.push_str(&symbol);
    if let Some(c) = chirality {
        s.push_str(c.as_str());
    }
    match atom.hydrogens() {
        0 => {}
        1 => s.push('H'),
        h => s.push_str(&format!("H{h}")),
    }
    match atom.charge {
        0 => {}
        1 => s.push('+'),
        -1 => s.push('-'),
        c if c > 0 => s.push_str(&format!("+{c}")),
        c => s.push_str(&format!("-{}", -c)),
    }
    s.push(']');
    s
}
