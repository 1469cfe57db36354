// Prompt rendering, equal task mixing and train/valid/test splits.
//
//     cargo run --example equal_mix

use std::collections::BTreeMap;

use chemtext::dataset::{build_splits, equal_mix, record_to_json, TaskKind, TaskRecord};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut streams = BTreeMap::new();
    streams.insert(
        TaskKind::Forward,
        vec![TaskRecord::new(TaskKind::Forward, "CC(=O)O.OCC", "CC(=O)OCC")?, TaskRecord::new(TaskKind::Forward, "C=C.Br", "CCBr")?],
    );
    streams.insert(
        TaskKind::Mol2Text,
        (0..6)
            .map(|i| TaskRecord::new(TaskKind::Mol2Text, &"C".repeat(i + 1), &format!("An alkane with {} carbons.", i + 1)))
            .collect::<Result<Vec<_>, _>>()?,
    );

    // forward has 2 records so it is oversampled; mol2text is subsampled
    let mixed = equal_mix(&streams, 4, 42)?;
    for r in &mixed {
        println!("{}", record_to_json(r));
    }
    assert_eq!(mixed, equal_mix(&streams, 4, 42)?);

    let splits = build_splits(&mixed, [0.75, 0.125, 0.125], 1)?;
    println!("train {} valid {} test {}", splits.train.len(), splits.valid.len(), splits.test.len());
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
