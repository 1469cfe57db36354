//! Test-only oracles shared by the integration suites.
//!
//! Nothing here calls the library's canonical writer: molecules are built as
//! plain graphs, rendered to SMILES by an independent randomised writer, and
//! compared with a brute-force isomorphism search.
#![allow(dead_code)]

pub mod linalg;
pub mod text;

use chemtext::smiles::{BondOrder, Molecule};
use rand::seq::SliceRandom;
use rand::Rng;

pub const ORDER_SINGLE: u8 = 1;
pub const ORDER_DOUBLE: u8 = 2;
pub const ORDER_TRIPLE: u8 = 3;
pub const ORDER_AROMATIC: u8 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomLabel {
    pub symbol: String,
    pub aromatic: bool,
    pub charge: i8,
    pub isotope: u16,
    pub hydrogens: u8,
}

#[derive(Debug, Clone)]
pub struct Graph {
    pub atoms: Vec<AtomLabel>,
    /// (a, b, order code)
    pub bonds: Vec<(usize, usize, u8)>,
}

impl Graph {
    pub fn neighbors(&self, a: usize) -> Vec<(usize, usize)> {
        self.bonds
            .iter()
            .enumerate()
            .filter_map(|(i, &(x, y, _))| {
                if x == a {
                    Some((y, i))
                } else if y == a {
                    Some((x, i))
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn from_molecule(mol: &Molecule) -> Graph {
        let atoms = mol
            .atoms()
            .iter()
            .map(|a| AtomLabel {
                symbol: a.element.symbol().to_string(),
                aromatic: a.aromatic,
                charge: a.charge,
                isotope: a.isotope.unwrap_or(0),
                hydrogens: a.hydrogens(),
            })
            .collect();
        let bonds = mol
            .bonds()
            .iter()
            .map(|b| {
                let code = match b.order {
                    BondOrder::Single => ORDER_SINGLE,
                    BondOrder::Double => ORDER_DOUBLE,
                    BondOrder::Triple => ORDER_TRIPLE,
                    BondOrder::Aromatic => ORDER_AROMATIC,
                };
                (b.a, b.b, code)
            })
            .collect();
        Graph { atoms, bonds }
    }
}

/// Lowest-valence table used by the generator (independent of the library).
fn lowest_valence(symbol: &str) -> u8 {
    match symbol {
        "B" => 3,
        "C" => 4,
        "N" | "P" => 3,
        "O" | "S" => 2,
        "F" | "Cl" | "Br" | "I" => 1,
        _ => 0,
    }
}

struct Gen {
    atoms: Vec<AtomLabel>,
    bonds: Vec<(usize, usize, u8)>,
    free: Vec<u8>,
}

impl Gen {
    fn add_atom(&mut self, symbol: &str, aromatic: bool, free: u8) -> usize {
        self.atoms.push(AtomLabel {
            symbol: symbol.to_string(),
            aromatic,
            charge: 0,
            isotope: 0,
            hydrogens: 0,
        });
        self.free.push(free);
        self.atoms.len() - 1
    }

    fn bonded(&self, a: usize, b: usize) -> bool {
        self.bonds
            .iter()
            .any(|&(x, y, _)| (x == a && y == b) || (x == b && y == a))
    }

    fn add_aromatic_ring<R: Rng>(&mut self, rng: &mut R) -> Vec<usize> {
        let six = rng.gen_bool(0.6);
        let mut ring = Vec::new();
        if six {
            for _ in 0..6 {
                if rng.gen_bool(0.15) {
                    ring.push(self.add_atom("N", true, 0));
                } else {
                    ring.push(self.add_atom("C", true, 1));
                }
            }
        } else {
            let hetero = *["O", "S", "NH"].choose(rng).unwrap();
            let first = if hetero == "NH" {
                self.add_atom("N", true, 1)
            } else {
                self.add_atom(hetero, true, 0)
            };
            ring.push(first);
            for _ in 0..4 {
                ring.push(self.add_atom("C", true, 1));
            }
        }
        for i in 0..ring.len() {
            let (a, b) = (ring[i], ring[(i + 1) % ring.len()]);
            self.bonds.push((a, b, ORDER_AROMATIC));
        }
        ring
    }
}

/// Random valid molecule with at most `max_atoms` heavy atoms.
pub fn random_graph<R: Rng>(rng: &mut R, max_atoms: usize) -> Graph {
    let target = rng.gen_range(1..=max_atoms);
    let mut g = Gen {
        atoms: Vec::new(),
        bonds: Vec::new(),
        free: Vec::new(),
    };
    if target >= 6 && rng.gen_bool(0.35) {
        g.add_aromatic_ring(rng);
    }
    let elements = [
        ("C", 12),
        ("N", 3),
        ("O", 3),
        ("S", 1),
        ("F", 1),
        ("Cl", 1),
        ("Br", 1),
    ];
    let total: u32 = elements.iter().map(|e| e.1).sum();
    while g.atoms.len() < target {
        if g.atoms.len() + 6 <= target && rng.gen_bool(0.08) {
            let ring = g.add_aromatic_ring(rng);
            // attach the new ring to an existing atom if possible
            let anchors: Vec<usize> = (0..ring[0]).filter(|&a| g.free[a] > 0).collect();
            let subs: Vec<usize> = ring.iter().copied().filter(|&a| g.free[a] > 0).collect();
            if let (Some(&a), Some(&b)) = (anchors.choose(rng), subs.choose(rng)) {
                g.bonds.push((a, b, ORDER_SINGLE));
                g.free[a] -= 1;
                g.free[b] -= 1;
            }
            continue;
        }
        let mut pick = rng.gen_range(0..total);
        let mut symbol = "C";
        for (s, w) in elements {
            if pick < w {
                symbol = s;
                break;
            }
            pick -= w;
        }
        let cap = lowest_valence(symbol);
        let anchors: Vec<usize> = (0..g.atoms.len()).filter(|&a| g.free[a] > 0).collect();
        let idx = g.add_atom(symbol, false, cap);
        if let Some(&a) = anchors.choose(rng) {
            let both_aliphatic = !g.atoms[a].aromatic;
            let max_order = g.free[a].min(cap);
            let order = if both_aliphatic && max_order >= 3 && rng.gen_bool(0.05) {
                3
            } else if both_aliphatic && max_order >= 2 && rng.gen_bool(0.15) {
                2
            } else {
                1
            };
            g.bonds.push((a, idx, order));
            g.free[a] -= order;
            g.free[idx] -= order;
        } else if !g.atoms.is_empty() && g.atoms.len() > 1 {
            // nothing to attach to: start a new fragment
        }
    }
    // extra ring closures between aliphatic atoms
    for _ in 0..rng.gen_range(0..=2) {
        let cands: Vec<usize> = (0..g.atoms.len())
            .filter(|&a| g.free[a] > 0 && !g.atoms[a].aromatic)
            .collect();
        if cands.len() < 2 {
            break;
        }
        let a = *cands.choose(rng).unwrap();
        let b = *cands.choose(rng).unwrap();
        if a != b && !g.bonded(a, b) {
            g.bonds.push((a.min(b), a.max(b), ORDER_SINGLE));
            g.free[a] -= 1;
            g.free[b] -= 1;
        }
    }
    // charges and isotopes
    for a in 0..g.atoms.len() {
        let degree = g.bonds.iter().filter(|&&(x, y, _)| x == a || y == a).count();
        let atom = &mut g.atoms[a];
        if atom.aromatic {
            continue;
        }
        match atom.symbol.as_str() {
            "N" if rng.gen_bool(0.08) => {
                atom.charge = 1;
                g.free[a] += 1;
            }
            "O" if degree == 1 && g.free[a] == 1 && rng.gen_bool(0.15) => {
                atom.charge = -1;
                g.free[a] -= 1;
            }
            "C" if rng.gen_bool(0.03) => atom.isotope = 13,
            _ => {}
        }
    }
    // hydrogens fill remaining capacity (pyrrole-type nitrogen keeps its H)
    for a in 0..g.atoms.len() {
        g.atoms[a].hydrogens = g.free[a];
    }
    Graph {
        atoms: g.atoms,
        bonds: g.bonds,
    }
}

fn implied_hydrogens(label: &AtomLabel, bond_sum: u8) -> Option<u8> {
    let low = lowest_valence(&label.symbol);
    if low == 0 {
        return None;
    }
    if label.aromatic {
        Some(low.saturating_sub(bond_sum + 1))
    } else {
        let table: &[u8] = match label.symbol.as_str() {
            "P" => &[3, 5],
            "S" => &[2, 4, 6],
            _ => &[low],
        };
        Some(table.iter().find(|&&v| v >= bond_sum).map_or(0, |v| v - bond_sum))
    }
}

fn atom_text(label: &AtomLabel, bond_sum: u8) -> String {
    let organic = ["B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I"].contains(&label.symbol.as_str());
    let sym = if label.aromatic {
        label.symbol.to_lowercase()
    } else {
        label.symbol.clone()
    };
    if organic
        && label.charge == 0
        && label.isotope == 0
        && implied_hydrogens(label, bond_sum) == Some(label.hydrogens)
    {
        return sym;
    }
    let mut s = String::from("[");
    if label.isotope != 0 {
        s.push_str(&label.isotope.to_string());
    }
    s.push_str(&sym);
    if label.hydrogens == 1 {
        s.push('H');
    } else if label.hydrogens > 1 {
        s.push_str(&format!("H{}", label.hydrogens));
    }
    match label.charge {
        0 => {}
        1 => s.push('+'),
        -1 => s.push('-'),
        c => s.push_str(&format!("{c:+}")),
    }
    s.push(']');
    s
}

/// Writes `g` as SMILES from a random start atom with random neighbour order,
/// random component order and randomly placed ring-bond symbols.
pub fn random_smiles<R: Rng>(g: &Graph, rng: &mut R) -> String {
    let n = g.atoms.len();
    let adj: Vec<Vec<(usize, usize)>> = (0..n).map(|a| g.neighbors(a)).collect();
    let bond_sum: Vec<u8> = (0..n)
        .map(|a| {
            adj[a]
                .iter()
                .map(|&(_, b)| match g.bonds[b].2 {
                    ORDER_AROMATIC => 1,
                    o => o,
                })
                .sum()
        })
        .collect();

    // components, each started from a random atom
    let mut comp_of = vec![usize::MAX; n];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for s in 0..n {
        if comp_of[s] != usize::MAX {
            continue;
        }
        let id = comps.len();
        let mut stack = vec![s];
        comp_of[s] = id;
        let mut members = vec![];
        while let Some(u) = stack.pop() {
            members.push(u);
            for &(v, _) in &adj[u] {
                if comp_of[v] == usize::MAX {
                    comp_of[v] = id;
                    stack.push(v);
                }
            }
        }
        comps.push(members);
    }
    comps.shuffle(rng);

    let mut visited = vec![false; n];
    let mut children: Vec<Vec<(usize, usize)>> = vec![vec![]; n];
    let mut ring_open: Vec<Vec<usize>> = vec![vec![]; n];
    let mut ring_close: Vec<Vec<usize>> = vec![vec![]; n];
    let mut seen_ring = std::collections::HashSet::new();
    let mut order_adj = adj.clone();
    for list in order_adj.iter_mut() {
        list.shuffle(rng);
    }

    fn span(
        u: usize,
        parent: Option<usize>,
        adj: &[Vec<(usize, usize)>],
        visited: &mut [bool],
        children: &mut [Vec<(usize, usize)>],
        ring_open: &mut [Vec<usize>],
        ring_close: &mut [Vec<usize>],
        seen: &mut std::collections::HashSet<usize>,
    ) {
        visited[u] = true;
        for &(v, b) in &adj[u] {
            if Some(b) == parent {
                continue;
            }
            if visited[v] {
                if seen.insert(b) {
                    ring_open[v].push(b);
                    ring_close[u].push(b);
                }
            } else {
                children[u].push((v, b));
                span(v, Some(b), adj, visited, children, ring_open, ring_close, seen);
            }
        }
    }

    let bond_symbol = |b: usize, rng: &mut R| -> String {
        let (x, y, order) = g.bonds[b];
        let both_aromatic = g.atoms[x].aromatic && g.atoms[y].aromatic;
        match order {
            ORDER_AROMATIC => if rng.gen_bool(0.3) { ":" } else { "" }.to_string(),
            ORDER_DOUBLE => "=".into(),
            ORDER_TRIPLE => "#".into(),
            _ => {
                if both_aromatic || rng.gen_bool(0.2) {
                    "-".into()
                } else {
                    String::new()
                }
            }
        }
    };

    struct Labels {
        open: std::collections::HashMap<usize, u32>,
        free: Vec<u32>,
        next: u32,
        /// ring bond symbol side: true = opener writes it
        opener_side: std::collections::HashMap<usize, bool>,
    }

    fn label_text(l: u32) -> String {
        if l < 10 {
            l.to_string()
        } else {
            format!("%{l:02}")
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn emit<R: Rng>(
        u: usize,
        g: &Graph,
        bond_sum: &[u8],
        children: &[Vec<(usize, usize)>],
        ring_open: &[Vec<usize>],
        ring_close: &[Vec<usize>],
        labels: &mut Labels,
        bond_symbol: &dyn Fn(usize, &mut R) -> String,
        rng: &mut R,
        out: &mut String,
    ) {
        out.push_str(&atom_text(&g.atoms[u], bond_sum[u]));
        for &b in &ring_close[u] {
            let l = labels.open.remove(&b).unwrap();
            if !labels.opener_side[&b] {
                out.push_str(&bond_symbol(b, rng));
            }
            out.push_str(&label_text(l));
            labels.free.push(l);
        }
        for &b in &ring_open[u] {
            let l = if !labels.free.is_empty() && rng.gen_bool(0.5) {
                let i = rng.gen_range(0..labels.free.len());
                labels.free.swap_remove(i)
            } else {
                labels.next += 1;
                labels.next - 1
            };
            let side = rng.gen_bool(0.5);
            labels.opener_side.insert(b, side);
            if side {
                out.push_str(&bond_symbol(b, rng));
            }
            labels.open.insert(b, l);
            out.push_str(&label_text(l));
        }
        let kids = &children[u];
        for (k, &(v, b)) in kids.iter().enumerate() {
            let last = k + 1 == kids.len();
            if !last {
                out.push('(');
            }
            out.push_str(&bond_symbol(b, rng));
            emit(v, g, bond_sum, children, ring_open, ring_close, labels, bond_symbol, rng, out);
            if !last {
                out.push(')');
            }
        }
    }

    let mut parts = Vec::new();
    for comp in &comps {
        let start = *comp.choose(rng).unwrap();
        span(
            start,
            None,
            &order_adj,
            &mut visited,
            &mut children,
            &mut ring_open,
            &mut ring_close,
            &mut seen_ring,
        );
        let mut labels = Labels {
            open: Default::default(),
            free: Vec::new(),
            next: if rng.gen_bool(0.1) { rng.gen_range(8..=90) } else { 1 },
            opener_side: Default::default(),
        };
        let mut out = String::new();
        emit(
            start,
            g,
            &bond_sum,
            &children,
            &ring_open,
            &ring_close,
            &mut labels,
            &bond_symbol,
            rng,
            &mut out,
        );
        parts.push(out);
    }
    parts.join(".")
}

/// Brute-force labelled-graph isomorphism by backtracking.
pub fn isomorphic(a: &Graph, b: &Graph) -> bool {
    if a.atoms.len() != b.atoms.len() || a.bonds.len() != b.bonds.len() {
        return false;
    }
    let mut la: Vec<&AtomLabel> = a.atoms.iter().collect();
    let mut lb: Vec<&AtomLabel> = b.atoms.iter().collect();
    la.sort();
    lb.sort();
    if la != lb {
        return false;
    }
    let n = a.atoms.len();
    let order = |g: &Graph| {
        let mut m = vec![vec![0u8; n]; n];
        for &(x, y, o) in &g.bonds {
            m[x][y] = o;
            m[y][x] = o;
        }
        m
    };
    let ma = order(a);
    let mb = order(b);
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn extend(
        i: usize,
        a: &Graph,
        b: &Graph,
        ma: &[Vec<u8>],
        mb: &[Vec<u8>],
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        let n = map.len();
        if i == n {
            return true;
        }
        for j in 0..n {
            if used[j] || a.atoms[i] != b.atoms[j] {
                continue;
            }
            if (0..i).any(|k| ma[i][k] != mb[j][map[k]]) {
                continue;
            }
            let deg_a = ma[i].iter().filter(|&&o| o > 0).count();
            let deg_b = mb[j].iter().filter(|&&o| o > 0).count();
            if deg_a != deg_b {
                continue;
            }
            map[i] = j;
            used[j] = true;
            if extend(i + 1, a, b, ma, mb, map, used) {
                return true;
            }
            used[j] = false;
        }
        false
    }
    extend(0, a, b, &ma, &mb, &mut map, &mut used)
}
