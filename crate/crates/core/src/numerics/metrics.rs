use serde::{Deserialize, Serialize};

use super::DenseMatrix;
use crate::error::{Error, Result};

/// Coefficient of determination and mean absolute error of one prediction set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricPair {
    pub r_squared: f64,
    pub mae: f64,
}

impl MetricPair {
    pub fn compute(y_true: &[f64], y_pred: &[f64]) -> Result<Self> {
        Ok(MetricPair {
            r_squared: r_squared(y_true, y_pred)?,
            mae: mean_absolute_error(y_true, y_pred)?,
        })
    }
}

/// Train and test scores of one fitted model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub r2_train: f64,
    pub r2_test: f64,
    pub mae_train: f64,
    pub mae_test: f64,
}

impl EvalReport {
    pub fn from_predictions(
        train_true: &[f64],
        train_pred: &[f64],
        test_true: &[f64],
        test_pred: &[f64],
    ) -> Result<Self> {
        let train = MetricPair::compute(train_true, train_pred)?;
        let test = MetricPair::compute(test_true, test_pred)?;
        Ok(EvalReport {
            r2_train: train.r_squared,
            r2_test: test.r_squared,
            mae_train: train.mae,
            mae_test: test.mae,
        })
    }
}

fn check_lengths(y_true: &[f64], y_pred: &[f64]) -> Result<()> {
    if y_true.len() != y_pred.len() {
        return Err(Error::contract(format!(
            "y_true has {} entries but y_pred has {}",
            y_true.len(),
            y_pred.len()
        )));
    }
    Ok(())
}

pub(crate) fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// `1 - SS_res / SS_tot`, with `SS_tot` taken about the mean of `y_true`.
pub fn r_squared(y_true: &[f64], y_pred: &[f64]) -> Result<f64> {
    check_lengths(y_true, y_pred)?;
    if y_true.len() < 2 {
        return Err(Error::contract("r_squared needs at least 2 observations"));
    }
    let m = mean(y_true);
    let ss_tot: f64 = y_true.iter().map(|y| (y - m) * (y - m)).sum();
    if ss_tot == 0.0 {
        return Err(Error::domain(
            "r_squared is undefined for a constant target (total sum of squares is zero)",
        ));
    }
    let ss_res: f64 = y_true.iter().zip(y_pred).map(|(y, p)| (y - p) * (y - p)).sum();
    Ok(1.0 - ss_res / ss_tot)
}

pub fn mean_absolute_error(y_true: &[f64], y_pred: &[f64]) -> Result<f64> {
    check_lengths(y_true, y_pred)?;
    if y_true.is_empty() {
        return Err(Error::contract("mean_absolute_error needs at least 1 observation"));
    }
    let total: f64 = y_true.iter().zip(y_pred).map(|(y, p)| (y - p).abs()).sum();
    Ok(total / y_true.len() as f64)
}

/// Symmetric Pearson matrix with the column names it was built from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub names: Vec<String>,
    pub matrix: DenseMatrix,
}

impl CorrelationMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.names.iter().position(|n| n == a)?;
        let j = self.names.iter().position(|n| n == b)?;
        Some(self.matrix.get(i, j))
    }
}

pub fn pearson_correlation_matrix(columns: &[(String, Vec<f64>)]) -> Result<CorrelationMatrix> {
    let k = columns.len();
    if k == 0 {
        return Err(Error::contract("no columns given"));
    }
    let n = columns[0].1.len();
    if n < 2 {
        return Err(Error::contract("correlation needs at least 2 observations"));
    }
    let mut centered = Vec::with_capacity(k);
    for (name, col) in columns {
        if col.len() != n {
            return Err(Error::contract(format!(
                "column `{name}` has {} entries, expected {n}",
                col.len()
            )));
        }
        if col.iter().any(|v| !v.is_finite()) {
            return Err(Error::contract(format!("column `{name}` has a non-finite value")));
        }
        let m = mean(col);
        let c: Vec<f64> = col.iter().map(|v| v - m).collect();
        let ss: f64 = c.iter().map(|v| v * v).sum();
        if ss == 0.0 {
            return Err(Error::domain(format!("column `{name}` has zero variance")));
        }
        centered.push((c, ss.sqrt()));
    }

    let mut out = DenseMatrix::identity(k);
    for i in 0..k {
        for j in i + 1..k {
            let (ci, si) = &centered[i];
            let (cj, sj) = &centered[j];
            let dot: f64 = ci.iter().zip(cj).map(|(a, b)| a * b).sum();
            let r = (dot / (si * sj)).clamp(-1.0, 1.0);
            out.set(i, j, r);
            out.set(j, i, r);
        }
    }
    Ok(CorrelationMatrix {
        names: columns.iter().map(|(n, _)| n.clone()).collect(),
        matrix: out,
    })
}
