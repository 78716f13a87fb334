//! Symbolic constitutive models for laser powder bed fusion.
//!
//! `meltmap` fits multivariate polynomial equations and tree/neighbour
//! ensembles that map process conditions (laser power, scan velocity) and
//! melt-pool dimensions to melt-pool geometry and spatter volume, and ships a
//! set of published reference equations ready to evaluate.
//!
//! ```
//! use meltmap::zoo;
//!
//! let depth = zoo::predict_melt_pool(200.0, 800.0).unwrap().depth;
//! assert!((depth - 77.9094).abs() < 1e-9);
//! ```
//!
//! Modules:
//!
//! - [`numerics`]: dense least squares, R², MAE, Pearson correlation.
//! - [`dataset`]: the process-map CSV schema, design matrices, splits, synthetic data.
//! - [`polyfit`]: polynomial fitting, equation printing, importance, degree selection.
//! - [`ensembles`]: CART, random forest, extra trees, bagging, gradient boosting, KNN.
//! - [`zoo`]: embedded reference equations.

pub mod api;
pub mod dataset;
pub mod ensembles;
mod error;
pub mod numerics;
pub mod polyfit;
pub mod zoo;

pub use error::{Error, Result};
