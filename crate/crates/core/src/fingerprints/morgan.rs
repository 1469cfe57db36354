use super::{ensure_valid, fnv1a, BitFingerprint, FingerprintError, Scheme};
use crate::smiles::Molecule;

/// Circular (ECFP-style) fingerprint.
///
/// Radius-0 identifiers hash the atom invariants `A, Z, degree, H, charge,
/// isotope (u16 LE), aromatic, in_ring`. Each later round hashes
/// `E, round, own id (u64 LE)` followed by the sorted `(bond code, neighbour
/// id)` pairs. Every identifier from rounds `0..=radius` sets bit `id % nbits`.
pub fn morgan_fingerprint(
    mol: &Molecule,
    radius: usize,
    nbits: usize,
) -> Result<BitFingerprint, FingerprintError> {
    ensure_valid(mol)?;
    let mut fp = BitFingerprint::new(Scheme::Morgan, nbits)?;
    let mut ids: Vec<u64> = (0..mol.atom_count())
        .map(|i| {
            let a = mol.atom(i);
            let iso = a.isotope.unwrap_or(0).to_le_bytes();
            fnv1a(&[
                b'A',
                a.element.atomic_number(),
                mol.degree(i) as u8,
                a.hydrogens(),
                a.charge as u8,
                iso[0],
                iso[1],
                a.aromatic as u8,
                mol.in_ring(i) as u8,
            ])
        })
        .collect();
    for &id in &ids {
        fp.set((id % nbits as u64) as usize);
    }
    for round in 1..=radius {
        let next: Vec<u64> = (0..mol.atom_count())
            .map(|i| {
                let mut env: Vec<(u8, u64)> = mol
                    .neighbors(i)
                    .iter()
                    .map(|&(nb, b)| (mol.bond(b).order.code(), ids[nb]))
                    .collect();
                env.sort_unstable();
                let mut bytes = Vec::with_capacity(10 + env.len() * 9);
                bytes.push(b'E');
                bytes.push(round as u8);
                bytes.extend_from_slice(&ids[i].to_le_bytes());
                for (code, id) in env {
                    bytes.push(code);
                    bytes.extend_from_slice(&id.to_le_bytes());
                }
                fnv1a(&bytes)
            })
            .collect();
        ids = next;
        for &id in &ids {
            fp.set((id % nbits as u64) as usize);
        }
    }
    Ok(fp)
}
