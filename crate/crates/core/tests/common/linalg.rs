//! Dense symmetric eigen solver (cyclic Jacobi) and a Fréchet distance built
//! on it, independent of the library's linear algebra.

pub type Mat = Vec<Vec<f64>>;

fn mul(a: &Mat, b: &Mat) -> Mat {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    let mut c = vec![vec![0.0; m]; n];
    for i in 0..n {
        for j in 0..m {
            for t in 0..k {
                c[i][j] += a[i][t] * b[t][j];
            }
        }
    }
    c
}

fn transpose(a: &Mat) -> Mat {
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

/// Eigenvalues and column eigenvectors of a symmetric matrix.
pub fn jacobi_eigen(a: &Mat) -> (Vec<f64>, Mat) {
    let n = a.len();
    let mut a = a.clone();
    let mut v: Mat = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

fn sqrt_psd(a: &Mat) -> Mat {
    let (vals, v) = jacobi_eigen(a);
    let n = a.len();
    let d: Mat = (0..n).map(|i| (0..n).map(|j| if i == j { vals[i].max(0.0).sqrt() } else { 0.0 }).collect()).collect();
    mul(&mul(&v, &d), &transpose(&v))
}

fn stats(x: &[Vec<f64>]) -> (Vec<f64>, Mat) {
    let (n, d) = (x.len(), x[0].len());
    let mu: Vec<f64> = (0..d).map(|j| x.iter().map(|r| r[j]).sum::<f64>() / n as f64).collect();
    let mut cov = vec![vec![0.0; d]; d];
    for r in x {
        for i in 0..d {
            for j in 0..d {
                cov[i][j] += (r[i] - mu[i]) * (r[j] - mu[j]) / (n as f64 - 1.0);
            }
        }
    }
    (mu, cov)
}

/// Uses `√Σb Σa √Σb` for the cross term, the mirror image of the usual order.
pub fn frechet(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let (ma, ca) = stats(a);
    let (mb, cb) = stats(b);
    let sb = sqrt_psd(&cb);
    let m = mul(&mul(&sb, &ca), &sb);
    let (vals, _) = jacobi_eigen(&m);
    let cross: f64 = vals.iter().map(|l| l.max(0.0).sqrt()).sum();
    let mean: f64 = ma.iter().zip(&mb).map(|(x, y)| (x - y) * (x - y)).sum();
    let tr = |c: &Mat| (0..c.len()).map(|i| c[i][i]).sum::<f64>();
    mean + tr(&ca) + tr(&cb) - 2.0 * cross
}
