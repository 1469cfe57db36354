// Score text-to-molecule predictions: exact match, validity, fingerprint
// similarities and string metrics.
//
//     cargo run --example text2mol_eval

use chemtext::dataset::TaskKind;
use chemtext::eval::{evaluate, PredictionPair, Text2MolConfig};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let rows = [
        ("OCC", "CCO"),          // same molecule, different spelling
        ("CCCN", "CCN"),         // close miss
        ("c1ccccc1", "c1ccncc1"), // pyridine vs benzene
        ("C1CC", "CC(=O)O"),     // unparseable prediction
    ];
    let pairs: Vec<_> = rows
        .iter()
        .enumerate()
        .map(|(i, (p, r))| PredictionPair::new(i.to_string(), TaskKind::Text2Mol, p, r))
        .collect();
    let report = evaluate(TaskKind::Text2Mol, &pairs, &Text2MolConfig::default(), None)?;
    for (name, entry) in &report.metrics {
        match entry.value() {
            Some(v) => println!("{name:<12} {v:.4} (n={})", entry.support()),
            None => println!("{name:<12} absent"),
        }
    }
    println!("{}", report.to_canonical_json());
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
