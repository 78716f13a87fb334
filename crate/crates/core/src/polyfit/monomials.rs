//! Monomial bases in graded-lexicographic order.
//!
//! For base features `(x_0, .., x_{d-1})` and total degree `n` the basis is
//! every `x_0^e_0 * .. * x_{d-1}^e_{d-1}` with `sum(e) <= n`, grouped by total
//! degree and, within a degree, ordered as the non-decreasing index tuples
//! `(i_1 <= .. <= i_k)` in lexicographic order. For `(P, V)` at degree 2 this
//! gives `1, P, V, P², PV, V²`.

use crate::error::{Error, Result};

pub const MAX_DEGREE: u32 = 10;

/// `C(degree + d, d)`, the number of monomials of total degree `<= degree`.
pub fn term_count(d: usize, degree: u32) -> usize {
    let n = degree as usize;
    // C(n + d, d) computed incrementally; exact for the sizes used here.
    (1..=d).fold(1usize, |acc, i| acc * (n + i) / i)
}

/// Exponent vectors of the full basis, intercept first.
pub fn monomial_exponents(d: usize, degree: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::with_capacity(term_count(d, degree));
    let mut combo = Vec::new();
    for k in 0..=degree as usize {
        combos(d, k, 0, &mut combo, &mut out);
    }
    out
}

fn combos(d: usize, k: usize, start: usize, combo: &mut Vec<usize>, out: &mut Vec<Vec<u32>>) {
    if combo.len() == k {
        let mut e = vec![0u32; d];
        for &i in combo.iter() {
            e[i] += 1;
        }
        out.push(e);
        return;
    }
    for i in start..d {
        combo.push(i);
        combos(d, k, i, combo, out);
        combo.pop();
    }
}

#[inline]
pub fn monomial_value(x: &[f64], exponents: &[u32]) -> f64 {
    x.iter()
        .zip(exponents)
        .fold(1.0, |acc, (&xi, &e)| if e == 0 { acc } else { acc * xi.powi(e as i32) })
}

/// Values of every basis monomial at `x`, intercept (`1`) first.
pub fn expand_monomials(x: &[f64], degree: u32) -> Result<Vec<f64>> {
    if x.is_empty() {
        return Err(Error::contract("expand_monomials needs at least one variable"));
    }
    if !(1..=MAX_DEGREE).contains(&degree) {
        return Err(Error::contract(format!(
            "degree must lie in 1..={MAX_DEGREE}, got {degree}"
        )));
    }
    Ok(monomial_exponents(x.len(), degree)
        .iter()
        .map(|e| monomial_value(x, e))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_vars_degree_two() {
        let e = monomial_exponents(2, 2);
        assert_eq!(e, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(expand_monomials(&[2.0, 3.0], 2).unwrap(), vec![1.0, 2.0, 3.0, 4.0, 6.0, 9.0]);
    }

    #[test]
    fn counts() {
        assert_eq!(term_count(2, 2), 6);
        assert_eq!(term_count(2, 3), 10);
        assert_eq!(term_count(2, 4), 15);
        assert_eq!(term_count(2, 6), 28);
        assert_eq!(term_count(3, 6), 84);
        assert_eq!(term_count(5, 2), 21);
        for d in 1..=4 {
            for n in 0..=6 {
                assert_eq!(monomial_exponents(d, n).len(), term_count(d, n));
            }
        }
    }

    #[test]
    fn three_vars_degree_three_order() {
        // L, W, D: ... L³, L²W, L²D, LW², LWD, LD², W³, W²D, WD², D³
        let e = monomial_exponents(3, 3);
        let cubic: Vec<_> = e.iter().filter(|v| v.iter().sum::<u32>() == 3).cloned().collect();
        assert_eq!(
            cubic,
            vec![
                vec![3, 0, 0],
                vec![2, 1, 0],
                vec![2, 0, 1],
                vec![1, 2, 0],
                vec![1, 1, 1],
                vec![1, 0, 2],
                vec![0, 3, 0],
                vec![0, 2, 1],
                vec![0, 1, 2],
                vec![0, 0, 3]
            ]
        );
    }

    #[test]
    fn degree_bounds() {
        assert!(expand_monomials(&[1.0], 0).is_err());
        assert!(expand_monomials(&[1.0], 11).is_err());
        assert!(expand_monomials(&[], 2).is_err());
        assert_eq!(expand_monomials(&[2.0], 10).unwrap().len(), 11);
    }
}
