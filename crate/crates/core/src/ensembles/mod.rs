//! Tree ensembles and nearest-neighbour regression.

mod model;
mod presets;
mod tree;

pub use crate::numerics::EvalReport;
pub use model::{
    evaluate_model, fit_ensemble, knn_predict, EnsembleConfig, FittedModel, ModelBody, ModelFamily,
    DEFAULT_LEARNING_RATE,
};
pub use presets::{preset, presets, InputSet};
pub use tree::{fit_cart, FeatureSubset, Node, RegressionTree, SplitMode, TreeParams};
