//! Dense least squares.
//!
//! The primary path is a Householder QR factorisation with column pivoting.
//! When the pivoted diagonal shows the design is numerically rank deficient
//! (or there are fewer rows than columns) the solve falls back to an SVD and
//! returns the minimum-norm minimiser instead.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::DenseMatrix;
use crate::error::{Error, Result};

/// Relative cut-off below which a singular value (or pivoted `|R_kk|`) is
/// treated as zero.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    PivotedQr,
    Svd,
}

/// Coefficients plus rank diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeastSquaresSolution {
    pub coefficients: Vec<f64>,
    /// Numerical rank of the design.
    pub rank: usize,
    /// `true` when `rank < p`; the coefficients are then the minimum-norm solution.
    pub rank_deficient: bool,
    pub method: SolveMethod,
}

/// Minimises `||design * beta - target||_2`.
pub fn solve_least_squares(design: &DenseMatrix, target: &[f64]) -> Result<LeastSquaresSolution> {
    let (n, p) = (design.rows(), design.cols());
    if n == 0 || p == 0 {
        return Err(Error::contract(format!("design must be non-empty, got {n}x{p}")));
    }
    if target.len() != n {
        return Err(Error::contract(format!(
            "design has {n} rows but target has {} entries",
            target.len()
        )));
    }
    if let Some(i) = target.iter().position(|v| !v.is_finite()) {
        return Err(Error::contract(format!("target entry {i} is not finite")));
    }

    if n >= p {
        if let Some(coefficients) = pivoted_qr_solve(design, target) {
            return Ok(LeastSquaresSolution {
                coefficients,
                rank: p,
                rank_deficient: false,
                method: SolveMethod::PivotedQr,
            });
        }
    }
    Ok(svd_min_norm(design, target))
}

/// Returns `None` when the pivoted diagonal reveals rank deficiency.
fn pivoted_qr_solve(design: &DenseMatrix, target: &[f64]) -> Option<Vec<f64>> {
    let p = design.cols();
    // Column-major working copy; each Householder step touches whole columns.
    let mut a: Vec<Vec<f64>> = (0..p).map(|c| design.column(c)).collect();
    let mut b = target.to_vec();
    let mut perm: Vec<usize> = (0..p).collect();
    let mut diag = vec![0.0; p];
    let mut r00 = 0.0;

    for k in 0..p {
        // Recomputing the trailing norms each step avoids the cancellation of
        // downdated norms; p is small here.
        let (best, best_norm) = (k..p)
            .map(|j| (j, norm(&a[j][k..])))
            .fold((k, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if best != k {
            a.swap(k, best);
            perm.swap(k, best);
        }
        if k == 0 {
            r00 = best_norm;
        }
        if best_norm == 0.0 || best_norm <= RANK_TOLERANCE * r00 {
            return None;
        }

        let x0 = a[k][k];
        let alpha = if x0 >= 0.0 { -best_norm } else { best_norm };
        let mut v: Vec<f64> = a[k][k..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|t| t * t).sum();
        diag[k] = alpha;
        if vnorm2 > 0.0 {
            for col in a.iter_mut().skip(k + 1) {
                reflect(&v, vnorm2, &mut col[k..]);
            }
            reflect(&v, vnorm2, &mut b[k..]);
        }
        a[k][k] = alpha;
        for t in a[k][k + 1..].iter_mut() {
            *t = 0.0;
        }
    }

    let mut z = vec![0.0; p];
    for i in (0..p).rev() {
        let mut s = b[i];
        for j in i + 1..p {
            s -= a[j][i] * z[j];
        }
        z[i] = s / diag[i];
    }
    let mut x = vec![0.0; p];
    for (k, &orig) in perm.iter().enumerate() {
        x[orig] = z[k];
    }
    Some(x)
}

#[inline]
fn norm(v: &[f64]) -> f64 {
    // Scaled to stay clear of overflow for raw high-degree monomials.
    let scale = v.iter().fold(0.0_f64, |m, t| m.max(t.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    scale * v.iter().map(|t| (t / scale).powi(2)).sum::<f64>().sqrt()
}

#[inline]
fn reflect(v: &[f64], vnorm2: f64, x: &mut [f64]) {
    let dot: f64 = v.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
    let f = 2.0 * dot / vnorm2;
    for (xi, vi) in x.iter_mut().zip(v) {
        *xi -= f * vi;
    }
}

fn svd_min_norm(design: &DenseMatrix, target: &[f64]) -> LeastSquaresSolution {
    let (n, p) = (design.rows(), design.cols());
    let a = DMatrix::from_row_slice(n, p, design.as_slice());
    let svd = a.svd(true, true);
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let sigma = &svd.singular_values;
    let smax = sigma.iter().fold(0.0_f64, |m, s| m.max(*s));
    let cutoff = RANK_TOLERANCE * smax;
    let b = DVector::from_column_slice(target);

    let mut x = DVector::<f64>::zeros(p);
    let mut rank = 0;
    for (i, &s) in sigma.iter().enumerate() {
        if s > cutoff && s > 0.0 {
            rank += 1;
            let coef = u.column(i).dot(&b) / s;
            x += v_t.row(i).transpose() * coef;
        }
    }
    LeastSquaresSolution {
        coefficients: x.iter().copied().collect(),
        rank,
        rank_deficient: rank < p,
        method: SolveMethod::Svd,
    }
}
