use super::{
    attend, bidirectional_forward, merge, Block, Combine, Matrix, MergeError, MergeOp, MergeParams,
};

/// Gradients of `sum(output)` with respect to every parameter and input.
/// `projection` is set only for the concat-project combine mode.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub wq: Matrix,
    pub wk: Matrix,
    pub wv: Matrix,
    pub projection: Option<Matrix>,
    pub h_t: Matrix,
    pub h_m: Matrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub max_rel_error: f64,
    /// Number of scalar entries compared.
    pub checked: usize,
    pub epsilon: f64,
}

struct BlockGrads {
    queries: Matrix,
    keys_values: Matrix,
    wq: Matrix,
    wk: Matrix,
    wv: Matrix,
}

fn add_into(acc: &mut Matrix, g: &Matrix) {
    *acc = acc.add(g).expect("gradient shapes agree");
}

/// Backprop through `softmax(Q Kᵀ/√d) V` given the output gradient.
fn block_backward(
    b: &Block,
    queries: &Matrix,
    keys_values: &Matrix,
    wq: &Matrix,
    wk: &Matrix,
    wv: &Matrix,
    d_out: &Matrix,
) -> Result<BlockGrads, MergeError> {
    let scale = 1.0 / (wq.cols() as f64).sqrt();
    let d_w = d_out.matmul(&b.v.transpose())?;
    let d_v = b.weights.transpose().matmul(d_out)?;
    let mut d_s = Matrix::zeros(d_w.rows(), d_w.cols());
    for i in 0..d_w.rows() {
        let p = b.weights.row(i);
        let g = d_w.row(i);
        let dot: f64 = p.iter().zip(g).map(|(a, c)| a * c).sum();
        for j in 0..d_w.cols() {
            d_s.set(i, j, p[j] * (g[j] - dot) * scale);
        }
    }
    let d_q = d_s.matmul(&b.k)?;
    let d_k = d_s.transpose().matmul(&b.q)?;
    let d_kv = d_k.matmul(&wk.transpose())?.add(&d_v.matmul(&wv.transpose())?)?;
    Ok(BlockGrads {
        queries: d_q.matmul(&wq.transpose())?,
        keys_values: d_kv,
        wq: queries.transpose().matmul(&d_q)?,
        wk: keys_values.transpose().matmul(&d_k)?,
        wv: keys_values.transpose().matmul(&d_v)?,
    })
}

/// Analytic gradients of the summed output of `op`.
pub fn gradients(op: MergeOp, h_t: &Matrix, h_m: &Matrix, p: &MergeParams) -> Result<Gradients, MergeError> {
    let out = merge(op, h_t, h_m, p)?;
    let ones = Matrix::from_fn(out.rows(), out.cols(), |_, _| 1.0);
    let mut g = Gradients {
        wq: Matrix::zeros(p.wq.rows(), p.wq.cols()),
        wk: Matrix::zeros(p.wk.rows(), p.wk.cols()),
        wv: Matrix::zeros(p.wv.rows(), p.wv.cols()),
        projection: None,
        h_t: Matrix::zeros(h_t.rows(), h_t.cols()),
        h_m: Matrix::zeros(h_m.rows(), h_m.cols()),
    };
    match op {
        MergeOp::CrossAttend | MergeOp::Hierarchical => {
            let depth = if op == MergeOp::CrossAttend { 1 } else { p.depth };
            let mut inputs = vec![h_t.clone()];
            let mut blocks = Vec::with_capacity(depth);
            for _ in 0..depth {
                let b = attend(inputs.last().unwrap(), h_m, &p.wq, &p.wk, &p.wv)?;
                inputs.push(b.out.clone());
                blocks.push(b);
            }
            let mut d = ones;
            for (level, b) in blocks.iter().enumerate().rev() {
                let bg = block_backward(b, &inputs[level], h_m, &p.wq, &p.wk, &p.wv, &d)?;
                add_into(&mut g.wq, &bg.wq);
                add_into(&mut g.wk, &bg.wk);
                add_into(&mut g.wv, &bg.wv);
                add_into(&mut g.h_m, &bg.keys_values);
                d = bg.queries;
            }
            g.h_t = d;
        }
        MergeOp::Bidirectional => {
            let fwd = bidirectional_forward(h_t, h_m, p)?;
            let d = p.d();
            let (d_tm, d_pooled) = match &p.combine {
                Combine::BidirectionalSum => (ones.clone(), Matrix::from_fn(1, d, |_, _| ones.rows() as f64)),
                Combine::BidirectionalConcatProject(proj) => {
                    let cat = fwd.concat.as_ref().expect("concat cached");
                    g.projection = Some(cat.transpose().matmul(&ones)?);
                    let d_cat = ones.matmul(&proj.transpose())?;
                    let d_tm = Matrix::from_fn(d_cat.rows(), d, |i, j| d_cat.get(i, j));
                    let d_pooled = Matrix::from_fn(1, d, |_, j| (0..d_cat.rows()).map(|i| d_cat.get(i, d + j)).sum());
                    (d_tm, d_pooled)
                }
                Combine::BaseOnly => unreachable!("rejected by the forward pass"),
            };
            let n_m = fwd.mt.out.rows();
            let d_mt = Matrix::from_fn(n_m, d, |_, j| d_pooled.get(0, j) / n_m as f64);
            let a = block_backward(&fwd.tm, h_t, h_m, &p.wq, &p.wk, &p.wv, &d_tm)?;
            let b = block_backward(&fwd.mt, h_m, h_t, &p.wk, &p.wq, &p.wq, &d_mt)?;
            g.wq = a.wq.add(&b.wk)?.add(&b.wv)?;
            g.wk = a.wk.add(&b.wq)?;
            g.wv = a.wv;
            g.h_t = a.queries.add(&b.keys_values)?;
            g.h_m = a.keys_values.add(&b.queries)?;
        }
        MergeOp::MeanAggregate => {
            g.h_t = ones.scale(0.5);
            let per_row = 0.5 * out.rows() as f64 / h_m.rows() as f64;
            g.h_m = Matrix::from_fn(h_m.rows(), h_m.cols(), |_, _| per_row);
        }
    }
    Ok(g)
}

/// Compares [`gradients`] against central differences of `sum(output)` on
/// every entry the operation depends on. `epsilon` must lie in `(0, 1e-3]`.
pub fn grad_check(
    op: MergeOp,
    h_t: &Matrix,
    h_m: &Matrix,
    p: &MergeParams,
    epsilon: f64,
) -> Result<GradCheckReport, MergeError> {
    if !(epsilon > 0.0 && epsilon <= 1e-3) {
        return Err(MergeError::Precondition(format!("epsilon {epsilon} outside (0, 1e-3]")));
    }
    let analytic = gradients(op, h_t, h_m, p)?;
    let loss = |ht: &Matrix, hm: &Matrix, q: &MergeParams| -> Result<f64, MergeError> {
        let s = merge(op, ht, hm, q)?.sum();
        if s.is_finite() {
            Ok(s)
        } else {
            Err(MergeError::NonFinite("loss".into()))
        }
    };

    let mut worst = 0.0f64;
    let mut checked = 0usize;
    let mut compare = |a: f64, n: f64| {
        let rel = (a - n).abs() / a.abs().max(n.abs()).max(1e-8);
        worst = worst.max(rel);
        checked += 1;
    };

    // which tensor is perturbed: 0 wq, 1 wk, 2 wv, 3 projection, 4 h_t, 5 h_m
    let mut targets: Vec<usize> = vec![4, 5];
    if op != MergeOp::MeanAggregate {
        targets.extend([0, 1, 2]);
    }
    if op == MergeOp::Bidirectional && matches!(p.combine, Combine::BidirectionalConcatProject(_)) {
        targets.push(3);
    }
    for t in targets {
        let grad = match t {
            0 => &analytic.wq,
            1 => &analytic.wk,
            2 => &analytic.wv,
            3 => analytic.projection.as_ref().expect("projection gradient"),
            4 => &analytic.h_t,
            _ => &analytic.h_m,
        };
        for idx in 0..grad.data().len() {
            let eval = |delta: f64| -> Result<f64, MergeError> {
                let mut q = p.clone();
                let mut ht = h_t.clone();
                let mut hm = h_m.clone();
                let m: &mut Matrix = match t {
                    0 => &mut q.wq,
                    1 => &mut q.wk,
                    2 => &mut q.wv,
                    3 => match &mut q.combine {
                        Combine::BidirectionalConcatProject(m) => m,
                        _ => unreachable!(),
                    },
                    4 => &mut ht,
                    _ => &mut hm,
                };
                m.data_mut()[idx] += delta;
                loss(&ht, &hm, &q)
            };
            let numeric = (eval(epsilon)? - eval(-epsilon)?) / (2.0 * epsilon);
            compare(grad.data()[idx], numeric);
        }
    }
    Ok(GradCheckReport { max_rel_error: worst, checked, epsilon })
}
