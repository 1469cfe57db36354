//! Cross-attention merging of a base-domain encoding `H_t` with an
//! adaptation-domain encoding `H_m`.
//!
//! One block computes `Q = H_t W_q`, `K = H_m W_k`, `V = H_m W_v` and returns
//! `softmax(Q Kᵀ / √d) V`. The maps are bias-free. Variants chain the block
//! (hierarchical), run it in both directions (bidirectional) or replace it by
//! plain averaging (mean aggregation). Analytic gradients of the summed output
//! are available for every variant and can be checked against central
//! differences with [`grad_check`].

mod grad;
mod matrix;

use thiserror::Error;

pub use grad::{grad_check, gradients, GradCheckReport, Gradients};
pub use matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MergeError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("combine error: {0}")]
    Combine(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// How the two directions of a bidirectional merge are combined.
#[derive(Debug, Clone, PartialEq)]
pub enum Combine {
    BaseOnly,
    /// `H_tm` plus the mean-pooled `H_mt` added to every row.
    BidirectionalSum,
    /// `[H_tm | pooled H_mt] · P` with `P` of shape `2d × d`.
    BidirectionalConcatProject(Matrix),
}

impl Combine {
    pub fn name(&self) -> &'static str {
        match self {
            Combine::BaseOnly => "base_only",
            Combine::BidirectionalSum => "bidirectional_sum",
            Combine::BidirectionalConcatProject(_) => "bidirectional_concat_project",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MergeParams {
    pub wq: Matrix,
    pub wk: Matrix,
    pub wv: Matrix,
    pub depth: usize,
    pub combine: Combine,
}

impl MergeParams {
    pub fn new(wq: Matrix, wk: Matrix, wv: Matrix, depth: usize, combine: Combine) -> Result<MergeParams, MergeError> {
        let p = MergeParams { wq, wk, wv, depth, combine };
        p.validate()?;
        Ok(p)
    }

    pub fn d(&self) -> usize {
        self.wq.cols()
    }

    pub fn validate(&self) -> Result<(), MergeError> {
        let d = self.d();
        if self.wk.cols() != d || self.wv.cols() != d {
            return Err(MergeError::Shape(format!(
                "W_q, W_k, W_v must share width d={d} (got {}, {})",
                self.wk.cols(),
                self.wv.cols()
            )));
        }
        if self.wk.rows() != self.wv.rows() {
            return Err(MergeError::Shape("W_k and W_v must have the same input width".into()));
        }
        if self.depth == 0 {
            return Err(MergeError::Precondition("depth must be at least 1".into()));
        }
        if let Combine::BidirectionalConcatProject(p) = &self.combine {
            if p.shape() != (2 * d, d) {
                return Err(MergeError::Shape(format!(
                    "projection must be {}x{d}, got {}x{}",
                    2 * d,
                    p.rows(),
                    p.cols()
                )));
            }
        }
        Ok(())
    }

    /// Reads the params text format: `depth N`, `combine NAME` and one
    /// `matrix NAME` section per matrix (`wq`, `wk`, `wv`, optionally
    /// `projection`), each followed by a matrix in the exchange format.
    /// `#` starts a comment line.
    pub fn parse(text: &str) -> Result<MergeParams, MergeError> {
        let mut depth = 1usize;
        let mut combine = String::from("base_only");
        let mut sections: Vec<(String, usize, String)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut words = line.split_whitespace();
            let head = words.next().unwrap_or_default();
            let arg = words.next();
            let perr = |m: &str| MergeError::Parse { line: i + 1, message: m.to_string() };
            match (head, arg) {
                ("depth", Some(v)) => depth = v.parse().map_err(|_| perr("bad depth"))?,
                ("combine", Some(v)) => combine = v.to_string(),
                ("matrix", Some(name)) => sections.push((name.to_string(), i + 1, String::new())),
                _ => match sections.last_mut() {
                    Some((_, _, body)) => {
                        body.push_str(line);
                        body.push('\n');
                    }
                    None => return Err(perr("expected `depth`, `combine` or `matrix`")),
                },
            }
        }
        let take = |name: &str| -> Result<Matrix, MergeError> {
            let (_, line, body) = sections
                .iter()
                .find(|(n, _, _)| n == name)
                .ok_or_else(|| MergeError::Parse { line: 0, message: format!("missing matrix `{name}`") })?;
            Matrix::parse(body).map_err(|e| match e {
                MergeError::Parse { line: l, message } => MergeError::Parse { line: line + l, message },
                other => other,
            })
        };
        let combine = match combine.as_str() {
            "base_only" => Combine::BaseOnly,
            "bidirectional_sum" => Combine::BidirectionalSum,
            "bidirectional_concat_project" => Combine::BidirectionalConcatProject(take("projection")?),
            other => return Err(MergeError::Combine(format!("unknown combine mode `{other}`"))),
        };
        MergeParams::new(take("wq")?, take("wk")?, take("wv")?, depth, combine)
    }
}

/// Forward pass of one attention block with everything needed for backprop.
pub(crate) struct Block {
    pub q: Matrix,
    pub k: Matrix,
    pub v: Matrix,
    pub weights: Matrix,
    pub out: Matrix,
}

pub(crate) fn attend(
    queries: &Matrix,
    keys_values: &Matrix,
    wq: &Matrix,
    wk: &Matrix,
    wv: &Matrix,
) -> Result<Block, MergeError> {
    if queries.cols() != wq.rows() {
        return Err(MergeError::Shape(format!(
            "query input has {} columns, query map expects {}",
            queries.cols(),
            wq.rows()
        )));
    }
    if keys_values.cols() != wk.rows() || keys_values.cols() != wv.rows() {
        return Err(MergeError::Shape(format!(
            "key/value input has {} columns, maps expect {} and {}",
            keys_values.cols(),
            wk.rows(),
            wv.rows()
        )));
    }
    let q = queries.matmul(wq)?;
    let k = keys_values.matmul(wk)?;
    let v = keys_values.matmul(wv)?;
    let scale = 1.0 / (wq.cols() as f64).sqrt();
    let mut weights = q.matmul(&k.transpose())?.scale(scale);
    weights.ensure_finite("attention scores")?;
    let m = weights.cols();
    for row in weights.data_mut().chunks_mut(m) {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for x in row.iter_mut() {
            *x = (*x - max).exp();
            total += *x;
        }
        for x in row.iter_mut() {
            *x /= total;
        }
    }
    let out = weights.matmul(&v)?;
    out.ensure_finite("attention output")?;
    Ok(Block { q, k, v, weights, out })
}

/// The row-stochastic attention matrix `softmax(Q Kᵀ / √d)`.
pub fn attention_weights(h_t: &Matrix, h_m: &Matrix, p: &MergeParams) -> Result<Matrix, MergeError> {
    p.validate()?;
    Ok(attend(h_t, h_m, &p.wq, &p.wk, &p.wv)?.weights)
}

/// One cross-attention block with the base domain as queries. Returns `n_t × d`.
pub fn cross_attend(h_t: &Matrix, h_m: &Matrix, p: &MergeParams) -> Result<Matrix, MergeError> {
    p.validate()?;
    Ok(attend(h_t, h_m, &p.wq, &p.wk, &p.wv)?.out)
}

/// Applies the block `p.depth` times, feeding each output back as the base.
pub fn hierarchical_merge(h_t: &Matrix, h_m: &Matrix, p: &MergeParams) -> Result<Matrix, MergeError> {
    p.validate()?;
    if p.depth > 1 && p.d() != p.wq.rows() {
        return Err(MergeError::Shape(format!(
            "depth {} needs d == h_t, got d={} and h_t={}",
            p.depth,
            p.d(),
            p.wq.rows()
        )));
    }
    let mut h = h_t.clone();
    for _ in 0..p.depth {
        h = attend(&h, h_m, &p.wq, &p.wk, &p.wv)?.out;
    }
    Ok(h)
}

pub(crate) struct Bidirectional {
    pub tm: Block,
    pub mt: Block,
    pub concat: Option<Matrix>,
    pub out: Matrix,
}

pub(crate) fn bidirectional_forward(h_t: &Matrix, h_m: &Matrix, p: &MergeParams) -> Result<Bidirectional, MergeError> {
    p.validate()?;
    if p.combine == Combine::BaseOnly {
        return Err(MergeError::Combine("bidirectional merge needs a bidirectional combine mode".into()));
    }
    let tm = attend(h_t, h_m, &p.wq, &p.wk, &p.wv)?;
    // reverse direction: adaptation tokens query the base tokens
    let mt = attend(h_m, h_t, &p.wk, &p.wq, &p.wq)?;
    let pooled = mt.out.col_mean();
    let d = p.d();
    let (concat, out) = match &p.combine {
        Combine::BidirectionalSum => {
            let out = Matrix::from_fn(tm.out.rows(), d, |i, j| tm.out.get(i, j) + pooled.get(0, j));
            (None, out)
        }
        Combine::BidirectionalConcatProject(proj) => {
            let cat = Matrix::from_fn(tm.out.rows(), 2 * d, |i, j| {
                if j < d {
                    tm.out.get(i, j)
                } else {
                    pooled.get(0, j - d)
                }
            });
            let out = cat.matmul(proj)?;
            (Some(cat), out)
        }
        Combine::BaseOnly => unreachable!(),
    };
    out.ensure_finite("combined output")?;
    Ok(Bidirectional { tm, mt, concat, out })
}

/// Merges in both directions and combines the results per `p.combine`.
///
/// The reverse direction uses `H_m` as queries through `W_k`, and `H_t` as
/// keys and values through `W_q`. Its output is mean-pooled over tokens so it
/// can be combined with `H_tm` whatever `n_t` and `n_m` are.
pub fn bidirectional_merge(h_t: &Matrix, h_m: &Matrix, p: &MergeParams) -> Result<Matrix, MergeError> {
    Ok(bidirectional_forward(h_t, h_m, p)?.out)
}

/// Averaging ablation: row `i` is `(H_t[i] + colmean(H_m)) / 2`.
pub fn mean_aggregate(h_t: &Matrix, h_m: &Matrix) -> Result<Matrix, MergeError> {
    if h_t.cols() != h_m.cols() {
        return Err(MergeError::Shape(format!(
            "mean aggregation needs equal widths, got {} and {}",
            h_t.cols(),
            h_m.cols()
        )));
    }
    let pooled = h_m.col_mean();
    Ok(Matrix::from_fn(h_t.rows(), h_t.cols(), |i, j| (h_t.get(i, j) + pooled.get(0, j)) / 2.0))
}

/// Selects the variant for [`merge`], [`gradients`] and [`grad_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MergeOp {
    CrossAttend,
    Hierarchical,
    Bidirectional,
    MeanAggregate,
}

impl MergeOp {
    pub fn name(self) -> &'static str {
        match self {
            MergeOp::CrossAttend => "cross_attend",
            MergeOp::Hierarchical => "hierarchical",
            MergeOp::Bidirectional => "bidirectional",
            MergeOp::MeanAggregate => "mean_aggregate",
        }
    }
}

pub fn merge(op: MergeOp, h_t: &Matrix, h_m: &Matrix, p: &MergeParams) -> Result<Matrix, MergeError> {
    match op {
        MergeOp::CrossAttend => cross_attend(h_t, h_m, p),
        MergeOp::Hierarchical => hierarchical_merge(h_t, h_m, p),
        MergeOp::Bidirectional => bidirectional_merge(h_t, h_m, p),
        MergeOp::MeanAggregate => mean_aggregate(h_t, h_m),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn params(ht: usize, hm: usize, d: usize) -> MergeParams {
        let f = |r, c, s: f64| Matrix::from_fn(r, c, |i, j| ((i * 7 + j * 3) as f64 * s).sin());
        MergeParams::new(f(ht, d, 0.37), f(hm, d, 0.53), f(hm, d, 0.71), 1, Combine::BaseOnly).unwrap()
    }

    #[test]
    fn single_key_copies_value_row() {
        let p = params(4, 5, 3);
        let ht = Matrix::from_fn(3, 4, |i, j| (i + j) as f64 * 0.3);
        let hm = Matrix::from_fn(1, 5, |_, j| j as f64 - 2.0);
        let v = hm.matmul(&p.wv).unwrap();
        let out = cross_attend(&ht, &hm, &p).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((out.get(i, j) - v.get(0, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn identical_keys_average_values() {
        let mut p = params(2, 2, 2);
        p.wk = Matrix::zeros(2, 2);
        let ht = m(&[&[1.0, 2.0], &[3.0, -1.0]]);
        let hm = m(&[&[1.0, 0.0], &[0.0, 1.0], &[2.0, 2.0]]);
        let out = cross_attend(&ht, &hm, &p).unwrap();
        let mean_v = hm.matmul(&p.wv).unwrap().col_mean();
        for i in 0..2 {
            for j in 0..2 {
                assert!((out.get(i, j) - mean_v.get(0, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hierarchical_depth_rules() {
        let mut p = params(3, 2, 3);
        let ht = Matrix::from_fn(2, 3, |i, j| (i as f64) - (j as f64) * 0.5);
        let hm = Matrix::from_fn(4, 2, |i, j| (i * j) as f64 * 0.25);
        assert_eq!(hierarchical_merge(&ht, &hm, &p).unwrap(), cross_attend(&ht, &hm, &p).unwrap());
        p.depth = 3;
        let mut manual = ht.clone();
        for _ in 0..3 {
            manual = cross_attend(&manual, &hm, &p).unwrap();
        }
        assert_eq!(hierarchical_merge(&ht, &hm, &p).unwrap(), manual);
        let wide = MergeParams { depth: 2, ..params(3, 2, 4) };
        assert!(matches!(hierarchical_merge(&ht, &hm, &wide), Err(MergeError::Shape(_))));
    }

    #[test]
    fn bidirectional_zero_adaptation_side() {
        // With H_m = 0 the forward direction attends uniformly over zero
        // values, while the reverse direction averages the rows of H_t W_q.
        let mut p = params(3, 2, 3);
        p.combine = Combine::BidirectionalSum;
        let ht = Matrix::from_fn(4, 3, |i, j| ((i + 2 * j) as f64).cos());
        let hm = Matrix::zeros(2, 2);
        let out = bidirectional_merge(&ht, &hm, &p).unwrap();
        let expected = ht.matmul(&p.wq).unwrap().col_mean();
        for i in 0..4 {
            for j in 0..3 {
                assert!((out.get(i, j) - expected.get(0, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bidirectional_concat_single_token() {
        // 1x1 everything: H_tm = hm*wv, H_mt = ht*wq, output = H_tm*p0 + H_mt*p1
        let proj = m(&[&[2.0], &[-3.0]]);
        let p = MergeParams::new(
            m(&[&[0.5]]),
            m(&[&[1.5]]),
            m(&[&[4.0]]),
            1,
            Combine::BidirectionalConcatProject(proj),
        )
        .unwrap();
        let out = bidirectional_merge(&m(&[&[2.0]]), &m(&[&[3.0]]), &p).unwrap();
        let expected = (3.0 * 4.0) * 2.0 + (2.0 * 0.5) * -3.0;
        assert!((out.get(0, 0) - expected).abs() < 1e-12);
        assert!(bidirectional_merge(&m(&[&[2.0]]), &m(&[&[3.0]]), &params(1, 1, 1)).is_err());
    }

    #[test]
    fn shape_errors() {
        let bad = MergeParams::new(Matrix::zeros(3, 2), Matrix::zeros(2, 3), Matrix::zeros(2, 2), 1, Combine::BaseOnly);
        assert!(matches!(bad, Err(MergeError::Shape(_))));
        let proj = Matrix::zeros(3, 3);
        let bad = MergeParams::new(
            Matrix::zeros(2, 2),
            Matrix::zeros(2, 2),
            Matrix::zeros(2, 2),
            1,
            Combine::BidirectionalConcatProject(proj),
        );
        assert!(matches!(bad, Err(MergeError::Shape(_))));
        let p = params(4, 5, 3);
        assert!(cross_attend(&Matrix::zeros(2, 3), &Matrix::zeros(2, 5), &p).is_err());
    }

    #[test]
    fn mean_aggregate_examples() {
        let ht = m(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let hm = m(&[&[0.0, 2.0], &[2.0, 0.0]]);
        assert_eq!(mean_aggregate(&ht, &hm).unwrap(), m(&[&[1.0, 1.5], &[2.0, 2.5]]));
        assert_eq!(mean_aggregate(&ht, &Matrix::zeros(3, 2)).unwrap(), ht.scale(0.5));
        let one = m(&[&[1.0, -4.0]]);
        assert_eq!(mean_aggregate(&one, &one).unwrap(), one);
        assert!(mean_aggregate(&ht, &Matrix::zeros(1, 3)).is_err());
    }

    #[test]
    fn large_inputs_stay_finite() {
        let p = params(4, 5, 3);
        let ht = Matrix::from_fn(3, 4, |i, j| if (i + j) % 2 == 0 { 1e3 } else { -1e3 });
        let hm = Matrix::from_fn(2, 5, |i, j| (i as f64 - j as f64) * 1e3);
        let w = attention_weights(&ht, &hm, &p).unwrap();
        for i in 0..3 {
            assert!((w.row(i).iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn params_text_format() {
        let text = "# demo\ndepth 2\ncombine bidirectional_sum\nmatrix wq\n2 2\n1 0\n0 1\n\
                    matrix wk\n3 2\n1 0 0 1 1 1\nmatrix wv\n3 2\n0.5 0 0 0.5 1 -1\n";
        let p = MergeParams::parse(text).unwrap();
        assert_eq!(p.depth, 2);
        assert_eq!(p.combine, Combine::BidirectionalSum);
        assert_eq!(p.wk.shape(), (3, 2));
        assert!(MergeParams::parse("depth 1\nmatrix wq\n1 1\n1\n").is_err());
        assert!(matches!(
            MergeParams::parse("combine sideways\nmatrix wq\n1 1\n1\nmatrix wk\n1 1\n1\nmatrix wv\n1 1\n1\n"),
            Err(MergeError::Combine(_))
        ));
    }
}
