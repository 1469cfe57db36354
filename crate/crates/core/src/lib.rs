pub mod cli;
pub mod dataset;
pub mod eval;
pub mod fingerprints;
pub mod merge;
pub mod text_metrics;
pub mod smiles;
