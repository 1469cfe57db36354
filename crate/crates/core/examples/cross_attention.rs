// Cross-attention merge of text and molecule hidden states, all four merge
// variants and a finite-difference gradient check.
//
//     cargo run --example cross_attention

use chemtext::merge::{attention_weights, grad_check, merge, Combine, Matrix, MergeOp, MergeParams};

fn pseudo(rows: usize, cols: usize, seed: f64) -> Matrix {
    Matrix::from_fn(rows, cols, |i, j| ((i * cols + j) as f64 * 0.37 + seed).sin() * 0.5)
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (h_t, h_m) = (pseudo(4, 6, 0.1), pseudo(3, 6, 1.3));
    let d = 6;
    let base = MergeParams::new(pseudo(6, d, 2.0), pseudo(6, d, 3.0), pseudo(6, d, 4.0), 1, Combine::BaseOnly)?;

    let w = attention_weights(&h_t, &h_m, &base)?;
    println!("attention weights (rows sum to 1):\n{w}");

    let deep = MergeParams { depth: 3, ..base.clone() };
    let bidi = MergeParams { combine: Combine::BidirectionalSum, ..base.clone() };
    for (op, p) in [
        (MergeOp::CrossAttend, &base),
        (MergeOp::Hierarchical, &deep),
        (MergeOp::Bidirectional, &bidi),
        (MergeOp::MeanAggregate, &base),
    ] {
        let out = merge(op, &h_t, &h_m, p)?;
        let gc = grad_check(op, &h_t, &h_m, p, 1e-5)?;
        println!("{:<14} out {:?}  grad-check max rel err {:.2e} over {} entries", op.name(), out.shape(), gc.max_rel_error, gc.checked);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
