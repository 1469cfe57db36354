use super::{ensure_valid, fnv1a, BitFingerprint, FingerprintError, Scheme};
use crate::smiles::Molecule;

/// Linear-path fingerprint over all simple paths of `1..=max_len` bonds.
///
/// A path is encoded as alternating atom bytes `(Z, aromatic)` and bond codes;
/// the smaller of the forward and reverse encodings is hashed (prefixed with
/// `P` and the bond count) and sets bit `hash % nbits`.
pub fn path_fingerprint(
    mol: &Molecule,
    max_len: usize,
    nbits: usize,
) -> Result<BitFingerprint, FingerprintError> {
    ensure_valid(mol)?;
    let mut fp = BitFingerprint::new(Scheme::Path, nbits)?;
    let n = mol.atom_count();
    let mut on_path = vec![false; n];
    let mut atoms = Vec::with_capacity(max_len + 1);
    let mut bonds = Vec::with_capacity(max_len);
    for start in 0..n {
        atoms.push(start);
        on_path[start] = true;
        extend(mol, max_len, &mut atoms, &mut bonds, &mut on_path, &mut fp);
        on_path[start] = false;
        atoms.pop();
    }
    Ok(fp)
}

fn extend(
    mol: &Molecule,
    max_len: usize,
    atoms: &mut Vec<usize>,
    bonds: &mut Vec<usize>,
    on_path: &mut [bool],
    fp: &mut BitFingerprint,
) {
    if !bonds.is_empty() {
        let h = fnv1a(&canonical_bytes(mol, atoms, bonds));
        fp.set((h % fp.nbits() as u64) as usize);
    }
    if bonds.len() == max_len {
        return;
    }
    let last = *atoms.last().expect("path has a start atom");
    for &(nb, b) in mol.neighbors(last) {
        if on_path[nb] {
            continue;
        }
        on_path[nb] = true;
        atoms.push(nb);
        bonds.push(b);
        extend(mol, max_len, atoms, bonds, on_path, fp);
        bonds.pop();
        atoms.pop();
        on_path[nb] = false;
    }
}

fn encode(mol: &Molecule, atoms: impl Iterator<Item = usize>, bonds: &[usize], out: &mut Vec<u8>) {
    for (k, a) in atoms.enumerate() {
        if k > 0 {
            out.push(mol.bond(bonds[k - 1]).order.code());
        }
        let atom = mol.atom(a);
        out.push(atom.element.atomic_number());
        out.push(atom.aromatic as u8);
    }
}

fn canonical_bytes(mol: &Molecule, atoms: &[usize], bonds: &[usize]) -> Vec<u8> {
    let mut fwd = vec![b'P', bonds.len() as u8];
    encode(mol, atoms.iter().copied(), bonds, &mut fwd);
    let rev_bonds: Vec<usize> = bonds.iter().rev().copied().collect();
    let mut rev = vec![b'P', bonds.len() as u8];
    encode(mol, atoms.iter().rev().copied(), &rev_bonds, &mut rev);
    fwd.min(rev)
}
