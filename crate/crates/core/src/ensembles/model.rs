use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{fit_cart, FeatureSubset, RegressionTree, SplitMode, TreeParams};
use crate::error::{Error, Result};
use crate::numerics::{DenseMatrix, EvalReport};

/// Learning rate used for gradient boosting when none is given.
pub const DEFAULT_LEARNING_RATE: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelFamily {
    RandomForest,
    ExtraTrees,
    Bagging,
    GradientBoost,
    Knn,
}

impl ModelFamily {
    pub const ALL: [ModelFamily; 5] = [
        ModelFamily::RandomForest,
        ModelFamily::ExtraTrees,
        ModelFamily::Bagging,
        ModelFamily::GradientBoost,
        ModelFamily::Knn,
    ];

    pub fn key(self) -> &'static str {
        match self {
            ModelFamily::RandomForest => "random_forest",
            ModelFamily::ExtraTrees => "extra_trees",
            ModelFamily::Bagging => "bagging",
            ModelFamily::GradientBoost => "gradient_boost",
            ModelFamily::Knn => "knn",
        }
    }

    fn uses_trees(self) -> bool {
        self != ModelFamily::Knn
    }
}

impl std::fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.key())
    }
}

impl std::str::FromStr for ModelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "random_forest" | "rf" => ModelFamily::RandomForest,
            "extra_trees" | "extratrees" | "extratree" | "et" => ModelFamily::ExtraTrees,
            "bagging" => ModelFamily::Bagging,
            "gradient_boost" | "gradient_boosting" | "gb" => ModelFamily::GradientBoost,
            "knn" => ModelFamily::Knn,
            _ => {
                return Err(Error::contract(format!(
                    "unknown model family `{s}`; expected one of {}",
                    ModelFamily::ALL.map(ModelFamily::key).join(", ")
                )))
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub family: ModelFamily,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_estimators: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_neighbors: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub learning_rate: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_min_leaf")]
    pub min_leaf: usize,
}

fn default_min_leaf() -> usize {
    1
}

impl EnsembleConfig {
    /// Tree family config; gradient boosting gets the default learning rate.
    pub fn trees(family: ModelFamily, n_estimators: usize, max_depth: usize) -> Self {
        EnsembleConfig {
            family,
            n_estimators: Some(n_estimators),
            max_depth: Some(max_depth),
            n_neighbors: None,
            learning_rate: (family == ModelFamily::GradientBoost).then_some(DEFAULT_LEARNING_RATE),
            seed: 0,
            min_leaf: 1,
        }
    }

    pub fn knn(n_neighbors: usize) -> Self {
        EnsembleConfig {
            family: ModelFamily::Knn,
            n_estimators: None,
            max_depth: None,
            n_neighbors: Some(n_neighbors),
            learning_rate: None,
            seed: 0,
            min_leaf: 1,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_learning_rate(mut self, lr: f64) -> Self {
        self.learning_rate = Some(lr);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fam = self.family;
        let bad = |msg: String| Err(Error::contract(format!("{fam}: {msg}")));
        if self.min_leaf == 0 {
            return bad("min_leaf must be >= 1".into());
        }
        if fam.uses_trees() {
            match self.n_estimators {
                None => return bad("n_estimators is required".into()),
                Some(0) => return bad("n_estimators must be >= 1".into()),
                _ => {}
            }
            match self.max_depth {
                None => return bad("max_depth is required".into()),
                Some(0) => return bad("max_depth must be >= 1".into()),
                _ => {}
            }
            if self.n_neighbors.is_some() {
                return bad("n_neighbors only applies to knn".into());
            }
        } else {
            match self.n_neighbors {
                None => return bad("n_neighbors is required".into()),
                Some(0) => return bad("n_neighbors must be >= 1".into()),
                _ => {}
            }
            if self.n_estimators.is_some() || self.max_depth.is_some() {
                return bad("n_estimators and max_depth do not apply to knn".into());
            }
        }
        match (fam == ModelFamily::GradientBoost, self.learning_rate) {
            (true, None) => bad("learning_rate is required".into()),
            (true, Some(lr)) if !(lr > 0.0 && lr <= 1.0) => bad(format!("learning_rate must lie in (0, 1], got {lr}")),
            (false, Some(_)) => bad("learning_rate only applies to gradient_boost".into()),
            _ => Ok(()),
        }
    }
}

/// Learned state of a fitted model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelBody {
    /// Prediction is the mean of the member trees.
    Averaged { trees: Vec<RegressionTree> },
    /// Prediction is `init + learning_rate * sum(trees)`.
    Boosted {
        init: f64,
        learning_rate: f64,
        trees: Vec<RegressionTree>,
        /// Training MSE after 0, 1, ..., M stages.
        stage_train_mse: Vec<f64>,
    },
    Neighbors { k: usize, x: DenseMatrix, y: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    pub config: EnsembleConfig,
    pub n_features: usize,
    pub model: ModelBody,
}

impl FittedModel {
    pub fn family(&self) -> ModelFamily {
        self.config.family
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n_features {
            return Err(Error::contract(format!(
                "model expects {} features, got {}",
                self.n_features,
                x.len()
            )));
        }
        match &self.model {
            ModelBody::Averaged { trees } => {
                let sum = trees.iter().map(|t| t.predict(x)).sum::<Result<f64>>()?;
                Ok(sum / trees.len() as f64)
            }
            ModelBody::Boosted { init, learning_rate, trees, .. } => {
                let mut f = *init;
                for t in trees {
                    f += learning_rate * t.predict(x)?;
                }
                Ok(f)
            }
            ModelBody::Neighbors { k, x: xt, y } => knn_predict(xt, y, x, *k),
        }
    }

    pub fn predict_matrix(&self, x: &DenseMatrix) -> Result<Vec<f64>> {
        (0..x.rows()).map(|r| self.predict(x.row(r))).collect()
    }

    /// Training MSE after 0, 1, ..., M stages for gradient boosting.
    pub fn stage_train_mse(&self) -> Option<&[f64]> {
        match &self.model {
            ModelBody::Boosted { stage_train_mse, .. } => Some(stage_train_mse),
            _ => None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: FittedModel = serde_json::from_str(text)?;
        m.config.validate()?;
        Ok(m)
    }
}

fn check_xy(x: &DenseMatrix, y: &[f64]) -> Result<()> {
    if x.rows() == 0 {
        return Err(Error::contract("cannot fit a model to empty data"));
    }
    if x.rows() != y.len() {
        return Err(Error::contract(format!("{} rows but {} targets", x.rows(), y.len())));
    }
    Ok(())
}

fn bootstrap(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..n)).collect()
}

pub fn fit_ensemble(x: &DenseMatrix, y: &[f64], config: &EnsembleConfig) -> Result<FittedModel> {
    config.validate()?;
    check_xy(x, y)?;
    let (n, d) = (x.rows(), x.cols());
    let model = match config.family {
        ModelFamily::Knn => {
            let k = config.n_neighbors.expect("validated");
            if k > n {
                return Err(Error::contract(format!("n_neighbors = {k} exceeds {n} training rows")));
            }
            ModelBody::Neighbors { k, x: x.clone(), y: y.to_vec() }
        }
        ModelFamily::GradientBoost => fit_boosted(x, y, config)?,
        fam => {
            let m = config.n_estimators.expect("validated");
            let (mode, subset, resample) = match fam {
                ModelFamily::RandomForest => (SplitMode::Best, FeatureSubset::Count(d.div_ceil(2)), true),
                ModelFamily::Bagging => (SplitMode::Best, FeatureSubset::All, true),
                _ => (SplitMode::RandomThreshold, FeatureSubset::All, false),
            };
            let trees = (0..m as u64)
                .into_par_iter()
                .map(|i| {
                    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(i));
                    let params = TreeParams {
                        max_depth: config.max_depth.expect("validated"),
                        min_leaf: config.min_leaf,
                        split_mode: mode,
                        feature_subset: subset,
                        seed: rng.random(),
                    };
                    if resample {
                        let idx = bootstrap(n, &mut rng);
                        let ys: Vec<f64> = idx.iter().map(|&r| y[r]).collect();
                        fit_cart(&x.select_rows(&idx), &ys, params)
                    } else {
                        fit_cart(x, y, params)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            ModelBody::Averaged { trees }
        }
    };
    Ok(FittedModel { config: *config, n_features: d, model })
}

fn mse(y: &[f64], f: &[f64]) -> f64 {
    y.iter().zip(f).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / y.len() as f64
}

fn fit_boosted(x: &DenseMatrix, y: &[f64], config: &EnsembleConfig) -> Result<ModelBody> {
    let lr = config.learning_rate.expect("validated");
    let params = TreeParams {
        max_depth: config.max_depth.expect("validated"),
        min_leaf: config.min_leaf,
        split_mode: SplitMode::Best,
        feature_subset: FeatureSubset::All,
        seed: config.seed,
    };
    let init = crate::numerics::mean(y);
    let mut f = vec![init; y.len()];
    let mut stage_train_mse = vec![mse(y, &f)];
    let mut trees = Vec::new();
    for _ in 0..config.n_estimators.expect("validated") {
        let residual: Vec<f64> = y.iter().zip(&f).map(|(a, b)| a - b).collect();
        let tree = fit_cart(x, &residual, params)?;
        for (r, fr) in f.iter_mut().enumerate() {
            *fr += lr * tree.predict(x.row(r))?;
        }
        stage_train_mse.push(mse(y, &f));
        trees.push(tree);
    }
    Ok(ModelBody::Boosted { init, learning_rate: lr, trees, stage_train_mse })
}

/// Mean target of the `k` nearest rows; equal distances go to the lower row.
pub fn knn_predict(x_train: &DenseMatrix, y_train: &[f64], x: &[f64], k: usize) -> Result<f64> {
    check_xy(x_train, y_train)?;
    if k == 0 || k > x_train.rows() {
        return Err(Error::contract(format!(
            "k must lie in 1..={}, got {k}",
            x_train.rows()
        )));
    }
    if x.len() != x_train.cols() {
        return Err(Error::contract(format!(
            "query has {} features, training data has {}",
            x.len(),
            x_train.cols()
        )));
    }
    let mut dist: Vec<(f64, usize)> = (0..x_train.rows())
        .map(|r| {
            let d2 = x_train.row(r).iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
            (d2, r)
        })
        .collect();
    dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(dist[..k].iter().map(|&(_, r)| y_train[r]).sum::<f64>() / k as f64)
}

/// Train and test R² and MAE of a fitted model.
pub fn evaluate_model(
    model: &FittedModel,
    train: (&DenseMatrix, &[f64]),
    test: (&DenseMatrix, &[f64]),
) -> Result<EvalReport> {
    let train_pred = model.predict_matrix(train.0)?;
    let test_pred = model.predict_matrix(test.0)?;
    EvalReport::from_predictions(train.1, &train_pred, test.1, &test_pred)
}
