// Parse, validate and canonicalize a handful of SMILES.
//
//     cargo run --example canonicalize

use chemtext::smiles::{canonicalize, check_smiles};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let inputs = ["OCC", "C(O)C", "c1ccccc1O", "Oc1ccccc1", "C[N+](C)(C)C", "C1CC", "C(C)(C)(C)(C)C"];
    for s in inputs {
        let (validity, mol) = check_smiles(s);
        match mol {
            Some(m) if validity.valid => println!("{s:<16} -> {}", canonicalize(&m)?),
            _ => println!("{s:<16} -> invalid: {validity}"),
        }
    }
    // two spellings, one canonical string
    assert_eq!(chemtext::smiles::canonical_smiles("OCC"), chemtext::smiles::canonical_smiles("C(O)C"));
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
