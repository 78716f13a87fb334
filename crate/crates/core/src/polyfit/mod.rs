//! Multivariate polynomial fitting and symbolic-equation extraction.

mod equation;
mod fit;
mod format;
mod importance;
mod monomials;

pub use equation::{evaluate_equation, FitDiagnostics, SymbolicEquation, Term};
pub use fit::{
    evaluate_split, fit_design, fit_polynomial, select_degree, DegreeReport, DegreeSelection,
    DEGREE_TIE_TOLERANCE,
};
pub use format::{equation_to_string, feature_symbol, format_number, monomial_label, FormatOptions, NumberStyle};
pub use importance::{feature_importance, ImportanceEntry, ImportanceReport};
pub use monomials::{expand_monomials, monomial_exponents, monomial_value, term_count, MAX_DEGREE};

/// Degrees tried by automatic degree selection.
pub const DEFAULT_DEGREES: [u32; 5] = [2, 3, 4, 5, 6];
