use nalgebra::{DMatrix, DVector, SymmetricEigen};
use thiserror::Error;

/// Eigenvalues below this are treated as a genuinely indefinite matrix.
const NEGATIVE_TOLERANCE: f64 = -1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrechetError {
    #[error("feature dimensions differ ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("feature set is empty")]
    Empty,
    #[error("non-finite feature value")]
    NonFinite,
    #[error("ill-conditioned covariance: {0}")]
    IllConditioned(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FrechetOptions {
    /// Added to every covariance diagonal. Required when a set has fewer
    /// than `d + 1` vectors.
    pub ridge: f64,
}

/// A Fréchet distance together with the name of the feature extractor that
/// produced the vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct FrechetScore {
    pub value: f64,
    pub feature_source: String,
}

pub fn frechet_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64, FrechetError> {
    frechet_distance_with(a, b, &FrechetOptions::default())
}

pub fn frechet_score(
    a: &[Vec<f64>],
    b: &[Vec<f64>],
    feature_source: &str,
    options: &FrechetOptions,
) -> Result<FrechetScore, FrechetError> {
    Ok(FrechetScore {
        value: frechet_distance_with(a, b, options)?,
        feature_source: feature_source.to_string(),
    })
}

/// `‖μa − μb‖² + Tr(Σa + Σb − 2 (Σa Σb)^½)`.
///
/// Covariances use the `n − 1` denominator. The trace of the square root is
/// taken from the eigenvalues of the symmetric matrix `√Σa · Σb · √Σa`, which
/// has the same spectrum as `Σa Σb`.
pub fn frechet_distance_with(
    a: &[Vec<f64>],
    b: &[Vec<f64>],
    options: &FrechetOptions,
) -> Result<f64, FrechetError> {
    let (mu_a, cov_a) = moments(a, options.ridge)?;
    let (mu_b, cov_b) = moments(b, options.ridge)?;
    if mu_a.len() != mu_b.len() {
        return Err(FrechetError::DimensionMismatch(mu_a.len(), mu_b.len()));
    }
    let sqrt_a = psd_sqrt(&cov_a)?;
    let product = &sqrt_a * &cov_b * &sqrt_a;
    let product = (&product + product.transpose()) * 0.5;
    let eig = SymmetricEigen::new(product);
    let mut tr_sqrt = 0.0;
    for &l in eig.eigenvalues.iter() {
        if l < NEGATIVE_TOLERANCE {
            return Err(FrechetError::IllConditioned(format!("eigenvalue {l:e} of the covariance product")));
        }
        tr_sqrt += l.max(0.0).sqrt();
    }
    let diff = mu_a - mu_b;
    let d = diff.dot(&diff) + cov_a.trace() + cov_b.trace() - 2.0 * tr_sqrt;
    Ok(d.max(0.0))
}

fn moments(x: &[Vec<f64>], ridge: f64) -> Result<(DVector<f64>, DMatrix<f64>), FrechetError> {
    let n = x.len();
    let d = x.first().ok_or(FrechetError::Empty)?.len();
    if d == 0 {
        return Err(FrechetError::Empty);
    }
    if let Some(row) = x.iter().find(|r| r.len() != d) {
        return Err(FrechetError::DimensionMismatch(d, row.len()));
    }
    if x.iter().flatten().any(|v| !v.is_finite()) || !ridge.is_finite() || ridge < 0.0 {
        return Err(FrechetError::NonFinite);
    }
    if n < 2 || (ridge == 0.0 && n < d + 1) {
        return Err(FrechetError::IllConditioned(format!(
            "{n} vectors of dimension {d}; need at least {} or a ridge",
            (d + 1).max(2)
        )));
    }
    let m = DMatrix::from_fn(n, d, |i, j| x[i][j]);
    let mu = DVector::from_fn(d, |j, _| m.column(j).sum() / n as f64);
    let mut centered = m;
    for j in 0..d {
        let mj = mu[j];
        centered.column_mut(j).iter_mut().for_each(|v| *v -= mj);
    }
    let mut cov = centered.transpose() * &centered / (n as f64 - 1.0);
    for j in 0..d {
        cov[(j, j)] += ridge;
    }
    Ok((mu, cov))
}

fn psd_sqrt(m: &DMatrix<f64>) -> Result<DMatrix<f64>, FrechetError> {
    let eig = SymmetricEigen::new(m.clone());
    if let Some(&l) = eig.eigenvalues.iter().find(|&&l| l < NEGATIVE_TOLERANCE) {
        return Err(FrechetError::IllConditioned(format!("covariance eigenvalue {l:e}")));
    }
    let roots = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0).sqrt()));
    Ok(&eig.eigenvectors * roots * eig.eigenvectors.transpose())
}
