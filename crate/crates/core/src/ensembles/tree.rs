//! Greedy CART regression trees.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;

/// Splits whose SSE reduction is below this fraction of the node SSE are
/// not taken.
const MIN_RELATIVE_GAIN: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitMode {
    /// Exhaustive search over midpoints of sorted unique feature values.
    Best,
    /// One uniform threshold per candidate feature; best of those.
    RandomThreshold,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSubset {
    All,
    /// Draw this many distinct features per split.
    Count(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_leaf: usize,
    pub split_mode: SplitMode,
    pub feature_subset: FeatureSubset,
    pub seed: u64,
}

impl TreeParams {
    pub fn best(max_depth: usize) -> Self {
        TreeParams {
            max_depth,
            min_leaf: 1,
            split_mode: SplitMode::Best,
            feature_subset: FeatureSubset::All,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Node {
    Leaf {
        value: f64,
        n_samples: usize,
    },
    Split {
        feature: usize,
        /// Rows with `x[feature] <= threshold` go left.
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

impl Node {
    fn predict(&self, x: &[f64]) -> f64 {
        let mut node = self;
        loop {
            match node {
                Node::Leaf { value, .. } => return *value,
                Node::Split { feature, threshold, left, right } => {
                    node = if x[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }

    fn depth(&self) -> usize {
        match self {
            Node::Leaf { .. } => 0,
            Node::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    fn visit_leaves(&self, out: &mut Vec<(f64, usize)>) {
        match self {
            Node::Leaf { value, n_samples } => out.push((*value, *n_samples)),
            Node::Split { left, right, .. } => {
                left.visit_leaves(out);
                right.visit_leaves(out);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    pub root: Node,
    pub max_depth: usize,
    pub min_leaf: usize,
    pub n_features: usize,
}

impl RegressionTree {
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n_features {
            return Err(Error::contract(format!(
                "tree expects {} features, got {}",
                self.n_features,
                x.len()
            )));
        }
        Ok(self.root.predict(x))
    }

    /// Length of the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    /// `(value, n_samples)` of every leaf, left to right.
    pub fn leaves(&self) -> Vec<(f64, usize)> {
        let mut out = Vec::new();
        self.root.visit_leaves(&mut out);
        out
    }
}

/// Mean of the selected targets, summed in ascending value order so the
/// result does not depend on row order.
pub(crate) fn leaf_mean(y: &[f64], idx: &[usize]) -> f64 {
    let mut v: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
    v.sort_by(f64::total_cmp);
    v.iter().sum::<f64>() / v.len() as f64
}

struct Builder<'a> {
    x: &'a DenseMatrix,
    y: &'a [f64],
    params: TreeParams,
    rng: ChaCha8Rng,
}

struct Candidate {
    feature: usize,
    threshold: f64,
    gain: f64,
}

pub fn fit_cart(x: &DenseMatrix, y: &[f64], params: TreeParams) -> Result<RegressionTree> {
    if x.rows() == 0 || y.is_empty() {
        return Err(Error::contract("cannot fit a tree to empty data"));
    }
    if x.rows() != y.len() {
        return Err(Error::contract(format!("{} rows but {} targets", x.rows(), y.len())));
    }
    if params.max_depth == 0 || params.min_leaf == 0 {
        return Err(Error::contract("max_depth and min_leaf must be >= 1"));
    }
    if let FeatureSubset::Count(k) = params.feature_subset {
        if k == 0 || k > x.cols() {
            return Err(Error::contract(format!(
                "feature subset size must lie in 1..={}, got {k}",
                x.cols()
            )));
        }
    }
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::contract(format!("target {i} is not finite")));
    }
    let mut b = Builder { x, y, params, rng: ChaCha8Rng::seed_from_u64(params.seed) };
    let idx: Vec<usize> = (0..y.len()).collect();
    let root = b.grow(idx, 0);
    Ok(RegressionTree {
        root,
        max_depth: params.max_depth,
        min_leaf: params.min_leaf,
        n_features: x.cols(),
    })
}

impl Builder<'_> {
    fn grow(&mut self, idx: Vec<usize>, depth: usize) -> Node {
        let n = idx.len();
        let value = leaf_mean(self.y, &idx);
        let leaf = Node::Leaf { value, n_samples: n };
        if depth >= self.params.max_depth || n < 2 * self.params.min_leaf {
            return leaf;
        }
        let centered: Vec<f64> = idx.iter().map(|&i| self.y[i] - value).collect();
        let mut sorted = centered.clone();
        sorted.sort_by(f64::total_cmp);
        let node_sse: f64 = sorted.iter().map(|c| c * c).sum();
        if node_sse <= 0.0 {
            return leaf;
        }
        let Some(best) = self.best_split(&idx, &centered) else {
            return leaf;
        };
        // Negated so a NaN gain also stops.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(best.gain > MIN_RELATIVE_GAIN * node_sse) {
            return leaf;
        }
        let (left, right): (Vec<usize>, Vec<usize>) =
            idx.iter().partition(|&&i| self.x.get(i, best.feature) <= best.threshold);
        Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left: Box::new(self.grow(left, depth + 1)),
            right: Box::new(self.grow(right, depth + 1)),
        }
    }

    fn candidate_features(&mut self) -> Vec<usize> {
        let d = self.x.cols();
        match self.params.feature_subset {
            FeatureSubset::All => (0..d).collect(),
            FeatureSubset::Count(k) if k >= d => (0..d).collect(),
            FeatureSubset::Count(k) => {
                let mut f = sample(&mut self.rng, d, k).into_vec();
                f.sort_unstable();
                f
            }
        }
    }

    /// Gain is `S_L²/n_L + S_R²/n_R` over node-centred targets, which equals
    /// the SSE reduction of the split.
    fn best_split(&mut self, idx: &[usize], centered: &[f64]) -> Option<Candidate> {
        let min_leaf = self.params.min_leaf;
        let n = idx.len();
        let mut best: Option<Candidate> = None;
        let consider = |c: Candidate, best: &mut Option<Candidate>| {
            if best.as_ref().is_none_or(|b| c.gain > b.gain) {
                *best = Some(c);
            }
        };

        for f in self.candidate_features() {
            match self.params.split_mode {
                SplitMode::Best => {
                    let mut pairs: Vec<(f64, f64)> =
                        idx.iter().zip(centered).map(|(&i, &c)| (self.x.get(i, f), c)).collect();
                    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
                    let total: f64 = pairs.iter().map(|p| p.1).sum();
                    let mut s_left = 0.0;
                    for i in 1..n {
                        s_left += pairs[i - 1].1;
                        let (lo, hi) = (pairs[i - 1].0, pairs[i].0);
                        if lo == hi || i < min_leaf || n - i < min_leaf {
                            continue;
                        }
                        let s_right = total - s_left;
                        let gain = s_left * s_left / i as f64 + s_right * s_right / (n - i) as f64;
                        consider(Candidate { feature: f, threshold: midpoint(lo, hi), gain }, &mut best);
                    }
                }
                SplitMode::RandomThreshold => {
                    let (lo, hi) = idx.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &i| {
                        let v = self.x.get(i, f);
                        (a.min(v), b.max(v))
                    });
                    if lo >= hi {
                        continue;
                    }
                    let threshold = self.rng.random_range(lo..hi);
                    let total: f64 = centered.iter().sum();
                    let (mut n_left, mut s_left) = (0usize, 0.0);
                    for (&i, &c) in idx.iter().zip(centered) {
                        if self.x.get(i, f) <= threshold {
                            n_left += 1;
                            s_left += c;
                        }
                    }
                    if n_left < min_leaf || n - n_left < min_leaf {
                        continue;
                    }
                    let s_right = total - s_left;
                    let gain = s_left * s_left / n_left as f64 + s_right * s_right / (n - n_left) as f64;
                    consider(Candidate { feature: f, threshold, gain }, &mut best);
                }
            }
        }
        best
    }
}

/// Midpoint that still separates `lo` from `hi` for adjacent floats.
fn midpoint(lo: f64, hi: f64) -> f64 {
    let m = lo + (hi - lo) / 2.0;
    if m >= hi {
        lo
    } else {
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(v: &[f64]) -> DenseMatrix {
        DenseMatrix::from_row_major(v.len(), 1, v.to_vec()).unwrap()
    }

    #[test]
    fn constant_target_is_single_leaf() {
        let t = fit_cart(&col(&[1.0, 2.0, 3.0, 4.0]), &[7.0; 4], TreeParams::best(5)).unwrap();
        assert_eq!(t.root, Node::Leaf { value: 7.0, n_samples: 4 });
    }

    #[test]
    fn step_function_depth_one() {
        let x = [0.1, 0.2, 0.3, 0.4, 0.6, 0.7, 0.8, 0.9];
        let y = [1.0, 1.0, 1.0, 1.0, 5.0, 5.0, 5.0, 5.0];
        let t = fit_cart(&col(&x), &y, TreeParams::best(1)).unwrap();
        match &t.root {
            Node::Split { feature: 0, threshold, left, right } => {
                assert!(*threshold > 0.4 && *threshold < 0.6);
                assert_eq!(**left, Node::Leaf { value: 1.0, n_samples: 4 });
                assert_eq!(**right, Node::Leaf { value: 5.0, n_samples: 4 });
            }
            other => panic!("expected a split, got {other:?}"),
        }
    }

    #[test]
    fn depth_and_min_leaf_respected() {
        let x: Vec<f64> = (0..50).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| (v * 0.37).sin()).collect();
        let params = TreeParams { min_leaf: 4, ..TreeParams::best(3) };
        let t = fit_cart(&col(&x), &y, params).unwrap();
        assert!(t.depth() <= 3);
        assert!(t.leaves().iter().all(|&(_, n)| n >= 4));
    }

    #[test]
    fn random_threshold_is_seeded() {
        let x: Vec<f64> = (0..30).map(|i| (i * 7 % 30) as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| v * v).collect();
        let p = TreeParams { split_mode: SplitMode::RandomThreshold, seed: 11, ..TreeParams::best(4) };
        let a = fit_cart(&col(&x), &y, p).unwrap();
        let b = fit_cart(&col(&x), &y, p).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_and_bad_params_rejected() {
        assert!(fit_cart(&DenseMatrix::zeros(0, 1), &[], TreeParams::best(2)).is_err());
        assert!(fit_cart(&col(&[1.0]), &[1.0], TreeParams::best(0)).is_err());
        let p = TreeParams { feature_subset: FeatureSubset::Count(2), ..TreeParams::best(2) };
        assert!(fit_cart(&col(&[1.0, 2.0]), &[1.0, 2.0], p).is_err());
    }

    #[test]
    fn adjacent_float_midpoint() {
        let lo = 1.0_f64;
        let hi = f64::from_bits(lo.to_bits() + 1);
        let m = midpoint(lo, hi);
        assert!(lo <= m && m < hi);
    }
}
