// Morgan, path and key fingerprints plus Tanimoto similarity.
//
//     cargo run --example similarity

use chemtext::fingerprints::{
    key_fingerprint, morgan_fingerprint, path_fingerprint, tanimoto, KeyTable, DEFAULT_MORGAN_RADIUS,
    DEFAULT_NBITS, DEFAULT_PATH_LENGTH,
};
use chemtext::smiles::Molecule;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let query = Molecule::from_smiles("CCO")?;
    let library = ["OCC", "CCN", "CCCO", "c1ccccc1", "CC(=O)O"];
    let keys = KeyTable::default_table();

    println!("{:<10} {:>8} {:>8} {:>8}", "smiles", "morgan", "path", "keys");
    for s in library {
        let m = Molecule::from_smiles(s)?;
        let morgan = tanimoto(
            &morgan_fingerprint(&query, DEFAULT_MORGAN_RADIUS, DEFAULT_NBITS)?,
            &morgan_fingerprint(&m, DEFAULT_MORGAN_RADIUS, DEFAULT_NBITS)?,
        )?;
        let path = tanimoto(
            &path_fingerprint(&query, DEFAULT_PATH_LENGTH, DEFAULT_NBITS)?,
            &path_fingerprint(&m, DEFAULT_PATH_LENGTH, DEFAULT_NBITS)?,
        )?;
        let key = tanimoto(&key_fingerprint(&query, &keys)?, &key_fingerprint(&m, &keys)?)?;
        println!("{s:<10} {morgan:>8.3} {path:>8.3} {key:>8.3}");
    }

    let benzene = key_fingerprint(&Molecule::from_smiles("c1ccccc1")?, &keys)?;
    println!("benzene sets {} of {} keys", benzene.count_ones(), benzene.nbits());
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
