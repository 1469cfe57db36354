// Fréchet distance between two sets of feature vectors.
//
//     cargo run --example frechet

use chemtext::eval::{frechet_distance, frechet_score, FrechetOptions};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let a: Vec<Vec<f64>> = (0..50).map(|i| vec![(i as f64 * 0.3).sin(), (i as f64 * 0.7).cos(), i as f64 / 50.0]).collect();
    let shifted: Vec<Vec<f64>> = a.iter().map(|v| v.iter().map(|x| x + 0.5).collect()).collect();
    let scaled: Vec<Vec<f64>> = a.iter().map(|v| v.iter().map(|x| x * 2.0).collect()).collect();

    println!("self     {:.6}", frechet_distance(&a, &a)?);
    println!("shifted  {:.6}  (3 dims x 0.5^2 = 0.75)", frechet_distance(&a, &shifted)?);
    println!("scaled   {:.6}", frechet_distance(&a, &scaled)?);

    // fewer vectors than dimensions needs a ridge
    let few = &a[..2];
    assert!(frechet_distance(few, &a).is_err());
    let s = frechet_score(few, &a, "toy-features", &FrechetOptions { ridge: 1e-6 })?;
    println!("2 vs 50 with ridge: {:.6} ({})", s.value, s.feature_source);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
