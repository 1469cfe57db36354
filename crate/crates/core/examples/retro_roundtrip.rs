// Round-trip accuracy for retrosynthesis: a forward oracle predicts the
// product of each proposed precursor set, which is compared to the target.
//
//     cargo run --example retro_roundtrip

use chemtext::dataset::TaskKind;
use chemtext::eval::{eval_retro, LookupOracle, OracleError, PredictionPair};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut oracle = LookupOracle::new();
    oracle.insert("CC(=O)O.OCC", "CC(=O)OCC");
    oracle.insert("C=C.Br", "CCBr");
    oracle.insert("CC(=O)Cl.N", "CC(N)=O");

    let pairs = vec![
        PredictionPair::new("esterification", TaskKind::Retro, "OCC.CC(=O)O", "CCOC(C)=O"),
        PredictionPair::new("hydrobromination", TaskKind::Retro, "C=C.Br", "BrCC"),
        PredictionPair::new("wrong precursors", TaskKind::Retro, "CC(=O)Cl.N", "CC(=O)OC"),
        PredictionPair::new("unknown to oracle", TaskKind::Retro, "CCO.O", "CCO"),
    ];
    let report = eval_retro(&pairs, &oracle)?;
    println!("{}", report.to_canonical_json());

    // any Fn(&str) -> Result<String, OracleError> + Sync works as an oracle
    let echo = |pre: &str| -> Result<String, OracleError> { Ok(pre.split('.').next().unwrap_or_default().to_string()) };
    let report = eval_retro(&pairs, &echo)?;
    println!("first-fragment oracle: {:?}", report.get("roundtrip_accuracy"));
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
