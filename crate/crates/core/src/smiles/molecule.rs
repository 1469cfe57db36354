use super::element::Element;
use super::validity::default_implicit_hydrogens;

/// Tetrahedral chirality as written: `@` or `@@`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Chirality {
    /// `@`
    CounterClockwise,
    /// `@@`
    Clockwise,
}

impl Chirality {
    pub fn inverted(self) -> Chirality {
        match self {
            Chirality::CounterClockwise => Chirality::Clockwise,
            Chirality::Clockwise => Chirality::CounterClockwise,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Chirality::CounterClockwise => "@",
            Chirality::Clockwise => "@@",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    /// Contribution to an atom's valence. Aromatic bonds count as 1; the
    /// aromatic atom's pi contribution is handled by the valence check.
    pub fn valence(self) -> u8 {
        match self {
            BondOrder::Single | BondOrder::Aromatic => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
        }
    }

    /// Stable small code used in invariants and fingerprint hashing.
    pub fn code(self) -> u8 {
        match self {
            BondOrder::Single => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
            BondOrder::Aromatic => 4,
        }
    }
}

/// Directional single-bond marker (`/` is `Up`, `\` is `Down`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BondStereo {
    None,
    Up,
    Down,
}

impl BondStereo {
    pub fn flipped(self) -> BondStereo {
        match self {
            BondStereo::None => BondStereo::None,
            BondStereo::Up => BondStereo::Down,
            BondStereo::Down => BondStereo::Up,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub element: Element,
    pub aromatic: bool,
    pub charge: i8,
    pub isotope: Option<u16>,
    /// Hydrogen count written inside a bracket atom; `None` for bare atoms.
    pub explicit_h: Option<u8>,
    pub chirality: Option<Chirality>,
    implicit_h: u8,
}

impl Atom {
    pub(crate) fn new(element: Element, aromatic: bool) -> Atom {
        Atom {
            element,
            aromatic,
            charge: 0,
            isotope: None,
            explicit_h: None,
            chirality: None,
            implicit_h: 0,
        }
    }

    /// Attached hydrogens: explicit for bracket atoms, from the valence table otherwise.
    pub fn hydrogens(&self) -> u8 {
        self.explicit_h.unwrap_or(self.implicit_h)
    }

    pub fn is_bracket(&self) -> bool {
        self.explicit_h.is_some()
    }
}

/// A bond between two atoms. `stereo` is relative to the direction `a -> b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub order: BondOrder,
    pub stereo: BondStereo,
}

impl Bond {
    pub fn other(&self, atom: usize) -> usize {
        if self.a == atom {
            self.b
        } else {
            self.a
        }
    }

    /// Stereo marker as seen when the bond is written from `from` to the other end.
    pub fn stereo_from(&self, from: usize) -> BondStereo {
        if from == self.a {
            self.stereo
        } else {
            self.stereo.flipped()
        }
    }
}

/// Entry in an atom's written neighbour order; used to interpret `@`/`@@`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NeighborRef {
    Atom(usize),
    ImplicitH,
}

/// Molecular graph parsed from SMILES.
#[derive(Debug, Clone, PartialEq)]
pub struct Molecule {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    adjacency: Vec<Vec<(usize, usize)>>,
    written_order: Vec<Vec<NeighborRef>>,
    ring_bond: Vec<bool>,
    fragment_count: usize,
}

impl Molecule {
    pub(crate) fn assemble(
        mut atoms: Vec<Atom>,
        bonds: Vec<Bond>,
        written_order: Vec<Vec<NeighborRef>>,
    ) -> Molecule {
        let mut adjacency = vec![Vec::new(); atoms.len()];
        for (i, bond) in bonds.iter().enumerate() {
            adjacency[bond.a].push((bond.b, i));
            adjacency[bond.b].push((bond.a, i));
        }
        for (i, atom) in atoms.iter_mut().enumerate() {
            if atom.explicit_h.is_none() {
                let demand: u8 = adjacency[i]
                    .iter()
                    .map(|&(_, b)| bonds[b].order.valence())
                    .sum();
                atom.implicit_h = default_implicit_hydrogens(atom.element, atom.aromatic, demand);
            }
        }
        let ring_bond = find_ring_bonds(atoms.len(), &bonds, &adjacency);
        let mut mol = Molecule {
            atoms,
            bonds,
            adjacency,
            written_order,
            ring_bond,
            fragment_count: 0,
        };
        mol.fragment_count = mol.components().len();
        mol
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn bond_count(&self) -> usize {
        self.bonds.len()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom(&self, i: usize) -> &Atom {
        &self.atoms[i]
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn bond(&self, i: usize) -> &Bond {
        &self.bonds[i]
    }

    /// `(neighbour atom, bond index)` pairs.
    pub fn neighbors(&self, atom: usize) -> &[(usize, usize)] {
        &self.adjacency[atom]
    }

    pub fn degree(&self, atom: usize) -> usize {
        self.adjacency[atom].len()
    }

    pub fn bond_between(&self, a: usize, b: usize) -> Option<&Bond> {
        self.adjacency[a]
            .iter()
            .find(|&&(nb, _)| nb == b)
            .map(|&(_, bi)| &self.bonds[bi])
    }

    /// Neighbour order as written in the source string.
    pub fn written_order(&self, atom: usize) -> &[NeighborRef] {
        &self.written_order[atom]
    }

    pub fn is_ring_bond(&self, bond: usize) -> bool {
        self.ring_bond[bond]
    }

    pub fn ring_bond_count(&self, atom: usize) -> usize {
        self.adjacency[atom]
            .iter()
            .filter(|&&(_, b)| self.ring_bond[b])
            .count()
    }

    pub fn in_ring(&self, atom: usize) -> bool {
        self.ring_bond_count(atom) > 0
    }

    /// Sum of bond valence contributions at an atom (aromatic bonds count 1).
    pub fn bond_order_sum(&self, atom: usize) -> u8 {
        self.adjacency[atom]
            .iter()
            .map(|&(_, b)| self.bonds[b].order.valence())
            .sum()
    }

    pub fn fragment_count(&self) -> usize {
        self.fragment_count
    }

    pub fn has_stereo(&self) -> bool {
        self.atoms.iter().any(|a| a.chirality.is_some())
            || self.bonds.iter().any(|b| b.stereo != BondStereo::None)
    }

    /// Connected components as sorted atom index lists, ordered by first atom.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.atoms.len()];
        let mut out = Vec::new();
        for start in 0..self.atoms.len() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut comp = Vec::new();
            while let Some(u) = stack.pop() {
                comp.push(u);
                for &(v, _) in &self.adjacency[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

/// Marks bonds that are not bridges (i.e. lie on a cycle).
fn find_ring_bonds(n: usize, bonds: &[Bond], adjacency: &[Vec<(usize, usize)>]) -> Vec<bool> {
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut is_bridge = vec![false; bonds.len()];
    let mut timer = 0;
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        // (atom, bond used to enter, next adjacency index)
        let mut stack: Vec<(usize, Option<usize>, usize)> = vec![(root, None, 0)];
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        while let Some(&mut (u, parent_bond, ref mut next)) = stack.last_mut() {
            if *next < adjacency[u].len() {
                let (v, b) = adjacency[u][*next];
                *next += 1;
                if Some(b) == parent_bond {
                    continue;
                }
                if disc[v] == usize::MAX {
                    disc[v] = timer;
                    low[v] = timer;
                    timer += 1;
                    stack.push((v, Some(b), 0));
                } else {
                    low[u] = low[u].min(disc[v]);
                }
            } else {
                stack.pop();
                if let (Some(&(p, _, _)), Some(b)) = (stack.last(), parent_bond) {
                    low[p] = low[p].min(low[u]);
                    if low[u] > disc[p] {
                        is_bridge[b] = true;
                    }
                }
            }
        }
    }
    is_bridge.into_iter().map(|b| !b).collect()
}
