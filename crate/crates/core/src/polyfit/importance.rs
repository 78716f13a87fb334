use serde::{Deserialize, Serialize};

use super::equation::SymbolicEquation;
use super::format::{feature_symbol, monomial_label};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImportanceEntry {
    pub label: String,
    pub exponents: Vec<u32>,
    pub abs_coefficient: f64,
    pub percent: f64,
}

/// Non-intercept terms ranked by their share of the total absolute coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImportanceReport {
    pub target: String,
    pub entries: Vec<ImportanceEntry>,
}

impl ImportanceReport {
    pub fn top(&self) -> &ImportanceEntry {
        &self.entries[0]
    }

    /// Aligned text table, one row per term.
    pub fn to_table(&self) -> String {
        let width = self.entries.iter().map(|e| e.label.chars().count()).max().unwrap_or(4).max(4);
        let mut out = format!("{:<3}  {:<width$}  {:>14}  {:>9}\n", "#", "term", "|coefficient|", "percent");
        for (i, e) in self.entries.iter().enumerate() {
            let pad = width - e.label.chars().count();
            out.push_str(&format!(
                "{:<3}  {}{}  {:>14.6e}  {:>8.4}%\n",
                i + 1,
                e.label,
                " ".repeat(pad),
                e.abs_coefficient,
                e.percent
            ));
        }
        out
    }
}

/// Percentage contribution of each non-intercept term, `|c| / sum|c| * 100`,
/// sorted descending. Ties keep basis order.
pub fn feature_importance(eq: &SymbolicEquation) -> Result<ImportanceReport> {
    let symbols: Vec<String> = eq.base_features().iter().map(|n| feature_symbol(n)).collect();
    let total: f64 = eq.terms()[1..].iter().map(|t| t.coefficient.abs()).sum();
    if total == 0.0 {
        return Err(Error::domain(
            "importance is undefined: every non-intercept coefficient is zero",
        ));
    }
    let mut entries: Vec<ImportanceEntry> = eq.terms()[1..]
        .iter()
        .map(|t| ImportanceEntry {
            label: monomial_label(&symbols, &t.exponents, false),
            exponents: t.exponents.clone(),
            abs_coefficient: t.coefficient.abs(),
            percent: t.coefficient.abs() / total * 100.0,
        })
        .collect();
    entries.sort_by(|a, b| b.percent.total_cmp(&a.percent));
    Ok(ImportanceReport { target: eq.target().to_string(), entries })
}
