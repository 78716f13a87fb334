//! Polynomial least-squares fitting.
//!
//! Raw monomials of power and velocity up to degree 6 span dozens of orders
//! of magnitude, so the solve never sees them directly. Each base feature is
//! standardised, `z = (x - mean) / std`, the graded-lex basis is built over
//! `z`, every design column is scaled to unit norm, and the least-squares
//! problem is solved in that basis. Because each `z_j` is affine in `x_j`,
//! the fitted polynomial is mapped back to raw monomial coefficients exactly
//! by binomial expansion of every `(x_j - mean_j)^k / std_j^k` factor.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::equation::{FitDiagnostics, SymbolicEquation};
use super::monomials::{monomial_exponents, monomial_value, MAX_DEGREE};
use crate::dataset::{build_design, split_indices, Dataset, FeatureSpec, Field};
use crate::error::{Error, Result};
use crate::numerics::{mean, r_squared, solve_least_squares, DenseMatrix, EvalReport};

/// Test-R² differences below this are treated as ties in degree selection.
pub const DEGREE_TIE_TOLERANCE: f64 = 1e-9;

/// Fits `target ~ polynomial(spec, degree)` over the whole dataset.
pub fn fit_polynomial(ds: &Dataset, spec: &FeatureSpec, target: Field, degree: u32) -> Result<SymbolicEquation> {
    ds.require_fit_size()?;
    let (x, names) = build_design(ds, spec)?;
    fit_design(&x, &ds.column(target), names, target.key(), degree)
}

/// Fits a polynomial to an arbitrary base-feature matrix.
pub fn fit_design(
    x: &DenseMatrix,
    y: &[f64],
    base_features: Vec<String>,
    target: &str,
    degree: u32,
) -> Result<SymbolicEquation> {
    let (n, d) = (x.rows(), x.cols());
    if n != y.len() {
        return Err(Error::contract(format!("{n} design rows but {} targets", y.len())));
    }
    if base_features.len() != d {
        return Err(Error::contract("one name per base feature is required"));
    }
    if !(1..=MAX_DEGREE).contains(&degree) {
        return Err(Error::contract(format!("degree must lie in 1..={MAX_DEGREE}, got {degree}")));
    }
    if n < 2 {
        return Err(Error::contract("fitting needs at least 2 observations"));
    }

    let scaling: Vec<(f64, f64)> = (0..d)
        .map(|j| {
            let col = x.column(j);
            let m = mean(&col);
            let var = col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n as f64;
            let s = var.sqrt();
            (m, if s > 0.0 { s } else { 1.0 })
        })
        .collect();

    let basis = monomial_exponents(d, degree);
    let p = basis.len();
    let mut z_design = DenseMatrix::zeros(n, p);
    let mut z = vec![0.0; d];
    for r in 0..n {
        for (j, zj) in z.iter_mut().enumerate() {
            let (m, s) = scaling[j];
            *zj = (x.get(r, j) - m) / s;
        }
        for (c, e) in basis.iter().enumerate() {
            z_design.set(r, c, monomial_value(&z, e));
        }
    }
    let col_norms: Vec<f64> = (0..p)
        .map(|c| {
            let nrm = (0..n).map(|r| z_design.get(r, c).powi(2)).sum::<f64>().sqrt();
            if nrm > 0.0 { nrm } else { 1.0 }
        })
        .collect();
    for r in 0..n {
        for (c, nrm) in col_norms.iter().enumerate() {
            z_design.set(r, c, z_design.get(r, c) / nrm);
        }
    }

    let sol = solve_least_squares(&z_design, y)?;
    let z_coefs: Vec<f64> = sol.coefficients.iter().zip(&col_norms).map(|(b, nrm)| b / nrm).collect();
    let raw = to_raw_basis(&basis, &z_coefs, &scaling);

    let eq = SymbolicEquation::from_coefficients(target, base_features, degree, &raw)?;
    let preds: Vec<f64> = (0..n).map(|r| eq.evaluate(x.row(r))).collect::<Result<_>>()?;
    let train_r2 = r_squared(y, &preds)?;
    Ok(eq.with_diagnostics(FitDiagnostics {
        train_r2,
        rank: Some(sol.rank),
        rank_deficient: Some(sol.rank_deficient),
    }))
}

/// Re-expresses `sum_t b_t * prod_j ((x_j - m_j) / s_j)^e_tj` in raw monomials.
fn to_raw_basis(basis: &[Vec<u32>], z_coefs: &[f64], scaling: &[(f64, f64)]) -> Vec<f64> {
    let index: HashMap<&[u32], usize> = basis.iter().enumerate().map(|(i, e)| (e.as_slice(), i)).collect();
    let mut raw = vec![0.0; basis.len()];
    let d = scaling.len();
    for (e, &b) in basis.iter().zip(z_coefs) {
        if b == 0.0 {
            continue;
        }
        // Expand factor by factor: list of (raw exponents, coefficient).
        let mut acc: Vec<(Vec<u32>, f64)> = vec![(vec![0; d], b)];
        for j in 0..d {
            let ej = e[j];
            if ej == 0 {
                continue;
            }
            let (m, s) = scaling[j];
            let scale = s.powi(ej as i32);
            let factor: Vec<(u32, f64)> = (0..=ej)
                .map(|k| (k, binomial(ej, k) * (-m).powi((ej - k) as i32) / scale))
                .collect();
            let mut next = Vec::with_capacity(acc.len() * factor.len());
            for (exps, c) in &acc {
                for &(k, f) in &factor {
                    let mut ne = exps.clone();
                    ne[j] = k;
                    next.push((ne, c * f));
                }
            }
            acc = next;
        }
        for (exps, c) in acc {
            raw[index[exps.as_slice()]] += c;
        }
    }
    raw
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Per-degree outcome of [`select_degree`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub degree: u32,
    pub report: EvalReport,
    pub rank_deficient: bool,
}

#[derive(Clone, Debug)]
pub struct DegreeSelection {
    pub chosen: u32,
    /// The chosen degree's fit on the training split.
    pub equation: SymbolicEquation,
    pub reports: Vec<DegreeReport>,
}

impl DegreeSelection {
    pub fn chosen_report(&self) -> &DegreeReport {
        self.reports.iter().find(|r| r.degree == self.chosen).expect("chosen degree was evaluated")
    }
}

/// Fits `equation` on train rows and scores it on both splits.
pub fn evaluate_split(eq: &SymbolicEquation, train: &Dataset, test: &Dataset, target: Field) -> Result<EvalReport> {
    let spec = eq.feature_spec()?;
    let predict = |ds: &Dataset| -> Result<Vec<f64>> {
        let (x, _) = build_design(ds, &spec)?;
        (0..x.rows()).map(|r| eq.evaluate(x.row(r))).collect()
    };
    EvalReport::from_predictions(&train.column(target), &predict(train)?, &test.column(target), &predict(test)?)
}

/// Fits each candidate degree on the training split and keeps the one with
/// the best test R²; near-ties go to the lowest degree.
pub fn select_degree(
    ds: &Dataset,
    spec: &FeatureSpec,
    target: Field,
    degrees: &[u32],
    test_fraction: f64,
    seed: u64,
) -> Result<DegreeSelection> {
    if degrees.is_empty() {
        return Err(Error::contract("no candidate degrees given"));
    }
    let (train_idx, test_idx) = split_indices(ds.len(), test_fraction, seed)?;
    let (train, test) = (ds.subset(&train_idx), ds.subset(&test_idx));

    let mut sorted = degrees.to_vec();
    sorted.sort_unstable();
    sorted.dedup();

    let fits: Vec<(u32, SymbolicEquation, EvalReport)> = sorted
        .par_iter()
        .map(|&deg| {
            let eq = fit_polynomial(&train, spec, target, deg)?;
            let report = evaluate_split(&eq, &train, &test, target)?;
            Ok((deg, eq, report))
        })
        .collect::<Result<_>>()?;

    let best = fits.iter().map(|f| f.2.r2_test).fold(f64::NEG_INFINITY, f64::max);
    let chosen_idx = fits
        .iter()
        .position(|f| f.2.r2_test >= best - DEGREE_TIE_TOLERANCE)
        .expect("at least one fit");
    let reports = fits
        .iter()
        .map(|(deg, eq, report)| DegreeReport {
            degree: *deg,
            report: *report,
            rank_deficient: eq.diagnostics().is_some_and(|d| d.rank_deficient == Some(true)),
        })
        .collect();
    let (chosen, equation, _) = fits.into_iter().nth(chosen_idx).expect("index in range");
    Ok(DegreeSelection { chosen, equation, reports })
}
