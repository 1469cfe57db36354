//! Brute-force text metric oracles written from the metric definitions.

use rand::seq::SliceRandom;
use rand::Rng;
use rust_stemmers::{Algorithm, Stemmer};

const VOCAB: &[&str] = &[
    "the", "a", "molecule", "molecules", "is", "an", "acid", "acids", "acidic", "base", "ring",
    "rings", "bond", "bonded", "bonding", "derived", "derives", "from", "of", "with", "group",
    "groups", "hydroxy", "amino", ",", ".", "(", ")",
];

pub fn random_sentence<R: Rng>(rng: &mut R, max_len: usize) -> Vec<String> {
    let n = rng.gen_range(0..=max_len);
    (0..n).map(|_| VOCAB.choose(rng).unwrap().to_string()).collect()
}

pub fn random_string<R: Rng>(rng: &mut R, max_len: usize) -> String {
    let alphabet = ['a', 'b', 'c', 'C', 'O', '=', '(', 'é', 'λ'];
    let n = rng.gen_range(0..=max_len);
    (0..n).map(|_| *alphabet.choose(rng).unwrap()).collect()
}

fn grams(tokens: &[String], n: usize) -> Vec<Vec<String>> {
    if tokens.len() < n {
        return Vec::new();
    }
    (0..=tokens.len() - n).map(|i| tokens[i..i + n].to_vec()).collect()
}

fn occurrences(list: &[Vec<String>], g: &[String]) -> usize {
    list.iter().filter(|x| x.as_slice() == g).count()
}

fn clipped(cand: &[String], reference: &[String], n: usize) -> (usize, usize, usize) {
    let c = grams(cand, n);
    let r = grams(reference, n);
    let mut seen: Vec<Vec<String>> = Vec::new();
    let mut overlap = 0;
    for g in &c {
        if seen.contains(g) {
            continue;
        }
        seen.push(g.clone());
        overlap += occurrences(&c, g).min(occurrences(&r, g));
    }
    (overlap, c.len(), r.len())
}

pub fn bleu(cands: &[Vec<String>], refs: &[Vec<String>], max_n: usize) -> f64 {
    let eps = 1e-9;
    let mut product = 1.0f64;
    for n in 1..=max_n {
        let (mut m, mut t) = (0usize, 0usize);
        for (c, r) in cands.iter().zip(refs) {
            let (o, cn, _) = clipped(c, r, n);
            m += o;
            t += cn;
        }
        product *= ((m as f64 + eps) / (t as f64 + eps)).powf(1.0 / max_n as f64);
    }
    let c: usize = cands.iter().map(Vec::len).sum();
    let r: usize = refs.iter().map(Vec::len).sum();
    let bp = if c >= r {
        1.0
    } else if c == 0 {
        0.0
    } else {
        (1.0 - r as f64 / c as f64).exp()
    };
    bp * product
}

fn f1(p: f64, r: f64) -> f64 {
    if p == 0.0 && r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

fn div(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

pub fn rouge_n(cands: &[Vec<String>], refs: &[Vec<String>], n: usize) -> f64 {
    let total: f64 = cands
        .iter()
        .zip(refs)
        .map(|(c, r)| {
            let (o, cn, rn) = clipped(c, r, n);
            f1(div(o, cn), div(o, rn))
        })
        .sum();
    total / cands.len() as f64
}

pub fn lcs(a: &[String], b: &[String]) -> usize {
    let mut t = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            t[i][j] = if a[i - 1] == b[j - 1] {
                t[i - 1][j - 1] + 1
            } else {
                t[i - 1][j].max(t[i][j - 1])
            };
        }
    }
    t[a.len()][b.len()]
}

pub fn rouge_l(cands: &[Vec<String>], refs: &[Vec<String>]) -> f64 {
    let total: f64 = cands
        .iter()
        .zip(refs)
        .map(|(c, r)| {
            let l = lcs(c, r);
            f1(div(l, c.len()), div(l, r.len()))
        })
        .sum();
    total / cands.len() as f64
}

/// Exact stage then stem stage, leftmost unused reference token each time.
pub fn meteor(cands: &[Vec<String>], refs: &[Vec<String>]) -> f64 {
    let stemmer = Stemmer::create(Algorithm::English);
    let (alpha, beta, gamma) = (0.9, 3.0, 0.5);
    let mut total = 0.0;
    for (c, r) in cands.iter().zip(refs) {
        let mut link: Vec<Option<usize>> = vec![None; c.len()];
        let mut taken = vec![false; r.len()];
        for stage in 0..2 {
            for i in 0..c.len() {
                if link[i].is_some() {
                    continue;
                }
                for j in 0..r.len() {
                    let same = if stage == 0 {
                        c[i] == r[j]
                    } else {
                        stemmer.stem(&c[i]) == stemmer.stem(&r[j])
                    };
                    if !taken[j] && same {
                        taken[j] = true;
                        link[i] = Some(j);
                        break;
                    }
                }
            }
        }
        let m = link.iter().filter(|l| l.is_some()).count();
        if m == 0 {
            continue;
        }
        let mut chunks = 0;
        let mut prev: Option<(usize, usize)> = None;
        for (i, l) in link.iter().enumerate() {
            if let Some(j) = *l {
                match prev {
                    Some((pi, pj)) if pi + 1 == i && pj + 1 == j => {}
                    _ => chunks += 1,
                }
                prev = Some((i, j));
            }
        }
        let p = m as f64 / c.len() as f64;
        let rc = m as f64 / r.len() as f64;
        let fmean = p * rc / (alpha * p + (1.0 - alpha) * rc);
        total += fmean * (1.0 - gamma * (chunks as f64 / m as f64).powf(beta));
    }
    total / cands.len() as f64
}

pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut t = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in t.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=b.len() {
        t[0][j] = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = t[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            t[i][j] = sub.min(t[i - 1][j] + 1).min(t[i][j - 1] + 1);
        }
    }
    t[a.len()][b.len()]
}
