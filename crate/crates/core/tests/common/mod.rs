//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use meltmap::numerics::DenseMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/data")
}

pub fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

/// Relative difference, with an absolute floor of 1 on the scale.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

// ---- least squares -------------------------------------------------------

/// Solves `(XᵀX) β = Xᵀy` by Gaussian elimination with partial pivoting.
pub fn normal_equations(x: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let p = x[0].len();
    let mut a = vec![vec![0.0; p + 1]; p];
    for (row, &yi) in x.iter().zip(y) {
        for i in 0..p {
            for j in 0..p {
                a[i][j] += row[i] * row[j];
            }
            a[i][p] += row[i] * yi;
        }
    }
    for col in 0..p {
        let piv = (col..p).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs())).unwrap();
        a.swap(col, piv);
        let pivot = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != col {
                let f = row[col] / pivot[col];
                for (v, pv) in row[col..].iter_mut().zip(&pivot[col..]) {
                    *v -= f * pv;
                }
            }
        }
    }
    (0..p).map(|i| a[i][p] / a[i][i]).collect()
}

/// Random `n × p` system with `p ≤ n`, entries uniform in [-1, 1].
pub fn random_system(r: &mut ChaCha8Rng) -> (Vec<Vec<f64>>, Vec<f64>) {
    let p = r.random_range(1..=6);
    let n = r.random_range(p..=20);
    let x: Vec<Vec<f64>> = (0..n).map(|_| (0..p).map(|_| r.random_range(-1.0..1.0)).collect()).collect();
    let y = (0..n).map(|_| r.random_range(-10.0..10.0)).collect();
    (x, y)
}

// ---- CART ----------------------------------------------------------------

/// Leaf value convention: mean of targets summed in ascending order.
pub fn sorted_mean(ys: &[f64]) -> f64 {
    let mut v = ys.to_vec();
    v.sort_by(f64::total_cmp);
    v.iter().sum::<f64>() / v.len() as f64
}

fn sse(ys: &[f64]) -> f64 {
    let m = sorted_mean(ys);
    ys.iter().map(|y| (y - m) * (y - m)).sum()
}

pub enum OracleTree {
    Leaf(f64),
    Split { feature: usize, threshold: f64, left: Box<OracleTree>, right: Box<OracleTree> },
}

impl OracleTree {
    pub fn predict(&self, x: &[f64]) -> f64 {
        match self {
            OracleTree::Leaf(v) => *v,
            OracleTree::Split { feature, threshold, left, right } => {
                if x[*feature] <= *threshold {
                    left.predict(x)
                } else {
                    right.predict(x)
                }
            }
        }
    }
}

/// Greedy tree where every node tries every (feature, midpoint) pair and
/// keeps the one with the smallest summed child SSE; ties go to the lowest
/// feature, then the lowest threshold.
pub fn greedy_tree(x: &[Vec<f64>], y: &[f64], depth: usize, min_leaf: usize) -> OracleTree {
    let ys: Vec<f64> = y.to_vec();
    let leaf = OracleTree::Leaf(sorted_mean(&ys));
    if depth == 0 || y.len() < 2 * min_leaf {
        return leaf;
    }
    let parent = sse(&ys);
    let mut best: Option<(f64, usize, f64)> = None;
    for f in 0..x[0].len() {
        let mut vals: Vec<f64> = x.iter().map(|r| r[f]).collect();
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        for w in vals.windows(2) {
            let t = w[0] + (w[1] - w[0]) / 2.0;
            let t = if t >= w[1] { w[0] } else { t };
            let (l, r): (Vec<f64>, Vec<f64>) = {
                let mut l = Vec::new();
                let mut r = Vec::new();
                for (row, &yi) in x.iter().zip(y) {
                    if row[f] <= t {
                        l.push(yi)
                    } else {
                        r.push(yi)
                    }
                }
                (l, r)
            };
            if l.len() < min_leaf || r.len() < min_leaf {
                continue;
            }
            let child = sse(&l) + sse(&r);
            if best.is_none_or(|b| child < b.0) {
                best = Some((child, f, t));
            }
        }
    }
    match best {
        Some((child, f, t)) if child < parent => {
            let (mut lx, mut ly, mut rx, mut ry) = (vec![], vec![], vec![], vec![]);
            for (row, &yi) in x.iter().zip(y) {
                if row[f] <= t {
                    lx.push(row.clone());
                    ly.push(yi);
                } else {
                    rx.push(row.clone());
                    ry.push(yi);
                }
            }
            OracleTree::Split {
                feature: f,
                threshold: t,
                left: Box::new(greedy_tree(&lx, &ly, depth - 1, min_leaf)),
                right: Box::new(greedy_tree(&rx, &ry, depth - 1, min_leaf)),
            }
        }
        _ => leaf,
    }
}

/// Smallest SSE over every tree of depth ≤ `depth` with midpoint splits.
pub fn optimal_tree_sse(x: &[Vec<f64>], y: &[f64], depth: usize) -> f64 {
    let mut best = sse(y);
    if depth == 0 || y.len() < 2 {
        return best;
    }
    for f in 0..x[0].len() {
        let mut vals: Vec<f64> = x.iter().map(|r| r[f]).collect();
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        for w in vals.windows(2) {
            let t = w[0] + (w[1] - w[0]) / 2.0;
            let (mut lx, mut ly, mut rx, mut ry) = (vec![], vec![], vec![], vec![]);
            for (row, &yi) in x.iter().zip(y) {
                if row[f] <= t {
                    lx.push(row.clone());
                    ly.push(yi);
                } else {
                    rx.push(row.clone());
                    ry.push(yi);
                }
            }
            let s = optimal_tree_sse(&lx, &ly, depth - 1) + optimal_tree_sse(&rx, &ry, depth - 1);
            best = best.min(s);
        }
    }
    best
}

pub fn tree_sse(predict: impl Fn(&[f64]) -> f64, x: &[Vec<f64>], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(r, yi)| (yi - predict(r)).powi(2)).sum()
}

/// Up to 8 points with 1–3 features on a coarse grid, so ties in x occur.
pub fn random_tree_data(r: &mut ChaCha8Rng) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = r.random_range(2..=8);
    let d = r.random_range(1..=3);
    let x: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| r.random_range(0..5) as f64).collect()).collect();
    let y = (0..n).map(|_| r.random_range(-10.0..10.0)).collect();
    (x, y)
}

pub fn matrix(rows: &[Vec<f64>]) -> DenseMatrix {
    DenseMatrix::from_rows(rows).unwrap()
}

// ---- nearest neighbours and correlation ----------------------------------

/// Sorts all distances, stable on row index, and averages the first k.
pub fn knn_oracle(x: &[Vec<f64>], y: &[f64], q: &[f64], k: usize) -> f64 {
    let mut d: Vec<(f64, usize)> = x
        .iter()
        .enumerate()
        .map(|(i, r)| (r.iter().zip(q).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt(), i))
        .collect();
    d.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    d[..k].iter().map(|&(_, i)| y[i]).sum::<f64>() / k as f64
}

/// Pearson r from the textbook single-pass sums.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (sa, sb) = (a.iter().sum::<f64>(), b.iter().sum::<f64>());
    let sab: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let saa: f64 = a.iter().map(|x| x * x).sum();
    let sbb: f64 = b.iter().map(|x| x * x).sum();
    (n * sab - sa * sb) / ((n * saa - sa * sa).sqrt() * (n * sbb - sb * sb).sqrt())
}

// ---- published-equation text ---------------------------------------------

/// One printed term: its coefficient token normalised to `5.40e-4` form,
/// the parsed value, and variable powers keyed by symbol (`P`, `log V`).
#[derive(Debug, Clone, PartialEq)]
pub struct PrintedTerm {
    pub token: String,
    pub value: f64,
    pub powers: BTreeMap<String, u32>,
}

/// Parses a LaTeX equation body such as
/// `53.7694 + 1.5055P - 2.92 \times 10^{-4}P^2 + 0.0011 WD - 0.0189 \log L \cdot W`.
pub fn parse_latex_equation(src: &str) -> Vec<PrintedTerm> {
    let s: Vec<char> = src.trim().chars().collect();
    let mut i = 0;
    let mut terms = Vec::new();
    let skip_ws = |i: &mut usize| {
        while *i < s.len() && s[*i].is_whitespace() {
            *i += 1;
        }
    };
    let starts = |i: usize, pat: &str| s[i..].iter().take(pat.len()).copied().eq(pat.chars());
    let read_int = |i: &mut usize| -> i64 {
        let braced = s[*i] == '{';
        if braced {
            *i += 1;
        }
        let st = *i;
        while *i < s.len() && (s[*i] == '-' || s[*i].is_ascii_digit()) {
            *i += 1;
            if !braced {
                break;
            }
        }
        let v: String = s[st..*i].iter().collect();
        if braced {
            assert_eq!(s[*i], '}', "unclosed brace in {src}");
            *i += 1;
        }
        v.parse().unwrap()
    };
    loop {
        skip_ws(&mut i);
        if i >= s.len() {
            break;
        }
        let mut negative = false;
        if s[i] == '+' || s[i] == '-' {
            negative = s[i] == '-';
            i += 1;
            skip_ws(&mut i);
        }
        let st = i;
        while i < s.len() && (s[i].is_ascii_digit() || s[i] == '.') {
            i += 1;
        }
        let mantissa: String = s[st..i].iter().collect();
        assert!(!mantissa.is_empty(), "expected a number at {i} in {src}");
        skip_ws(&mut i);
        let mut token = mantissa.clone();
        if starts(i, "\\times") {
            i += "\\times".len();
            skip_ws(&mut i);
            assert!(starts(i, "10^"), "expected 10^ in {src}");
            i += 3;
            let e = read_int(&mut i);
            token = format!("{mantissa}e{e}");
        }
        let value: f64 = token.parse().unwrap();
        let mut powers = BTreeMap::new();
        loop {
            skip_ws(&mut i);
            if i >= s.len() || s[i] == '+' || s[i] == '-' {
                break;
            }
            if starts(i, "\\cdot") {
                i += "\\cdot".len();
                continue;
            }
            let (sym, mut power) = if starts(i, "(\\log") {
                i += "(\\log".len();
                skip_ws(&mut i);
                let v = s[i];
                i += 1;
                assert_eq!(s[i], ')', "unclosed log group in {src}");
                i += 1;
                (format!("log {v}"), 1)
            } else if starts(i, "\\log") {
                i += "\\log".len();
                skip_ws(&mut i);
                let v = s[i];
                i += 1;
                (format!("log {v}"), 1)
            } else {
                let v = s[i];
                assert!("PVLWD".contains(v), "unexpected `{v}` in {src}");
                i += 1;
                (v.to_string(), 1)
            };
            if i < s.len() && s[i] == '^' {
                i += 1;
                power = read_int(&mut i) as u32;
            }
            *powers.entry(sym).or_insert(0) += power;
        }
        let signed_token = if negative { format!("-{token}") } else { token };
        terms.push(PrintedTerm { token: signed_token, value: if negative { -value } else { value }, powers });
    }
    terms
}

/// Signed coefficient tokens of a rendered equation such as
/// `53.7694 + 1.5055·P − 2.92e-4·P²`.
pub fn rendered_tokens(text: &str) -> Vec<String> {
    let t = text.replace('−', "-");
    let mut out = Vec::new();
    let mut sign = "";
    for (k, piece) in t.split(' ').enumerate() {
        match piece {
            "+" => sign = "",
            "-" => sign = "-",
            // label fragments after a space, such as the `V` in `log V`
            _ if !piece.trim_start_matches('-').starts_with(|c: char| c.is_ascii_digit()) => {}
            _ => {
                let (num, neg) = match piece.strip_prefix('-') {
                    Some(rest) if k == 0 => (rest, true),
                    _ => (piece, false),
                };
                let coef = num.split('·').next().unwrap();
                out.push(format!("{}{coef}", if neg { "-" } else { sign }));
                sign = "";
            }
        }
    }
    out
}
