use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::monomials::{monomial_exponents, monomial_value, term_count, MAX_DEGREE};
use crate::dataset::{FeatureSpec, Field};
use crate::error::{Error, Result};

/// One monomial and its coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub exponents: Vec<u32>,
    pub coefficient: f64,
}

impl Term {
    pub fn is_intercept(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    pub train_r2: f64,
    /// Solver rank. `None` when the coefficients were not solved here, as
    /// for transcribed or loaded equations; JSON keeps only `train_r2`.
    pub rank: Option<usize>,
    pub rank_deficient: Option<bool>,
}

/// A complete polynomial over named base features.
///
/// Terms always cover the full graded-lex basis for `degree`, intercept
/// first, so the term list has exactly `C(degree + d, d)` entries.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolicEquation {
    target: String,
    base_features: Vec<String>,
    degree: u32,
    terms: Vec<Term>,
    diagnostics: Option<FitDiagnostics>,
}

impl SymbolicEquation {
    /// Builds from coefficients listed in graded-lex basis order.
    pub fn from_coefficients(
        target: impl Into<String>,
        base_features: Vec<String>,
        degree: u32,
        coefficients: &[f64],
    ) -> Result<Self> {
        let basis = monomial_exponents(base_features.len(), degree);
        if coefficients.len() != basis.len() {
            return Err(Error::contract(format!(
                "{} base features at degree {degree} need {} coefficients, got {}",
                base_features.len(),
                basis.len(),
                coefficients.len()
            )));
        }
        let terms = basis
            .into_iter()
            .zip(coefficients)
            .map(|(exponents, &coefficient)| Term { exponents, coefficient })
            .collect();
        Self::new(target, base_features, degree, terms)
    }

    /// Validates the term list and reorders it into graded-lex order.
    pub fn new(
        target: impl Into<String>,
        base_features: Vec<String>,
        degree: u32,
        terms: Vec<Term>,
    ) -> Result<Self> {
        let d = base_features.len();
        if d == 0 {
            return Err(Error::contract("equation needs at least one base feature"));
        }
        for (i, name) in base_features.iter().enumerate() {
            if base_features[..i].contains(name) {
                return Err(Error::contract(format!("base feature `{name}` listed twice")));
            }
        }
        if degree > MAX_DEGREE {
            return Err(Error::contract(format!("degree {degree} exceeds {MAX_DEGREE}")));
        }
        let expected = term_count(d, degree);
        if terms.len() != expected {
            return Err(Error::contract(format!(
                "degree {degree} over {d} features needs {expected} terms, got {}",
                terms.len()
            )));
        }
        let basis = monomial_exponents(d, degree);
        let mut slots: Vec<Option<Term>> = vec![None; basis.len()];
        for t in terms {
            if t.exponents.len() != d {
                return Err(Error::contract(format!(
                    "term exponent vector {:?} does not have {d} entries",
                    t.exponents
                )));
            }
            if t.degree() > degree {
                return Err(Error::contract(format!(
                    "term {:?} exceeds degree {degree}",
                    t.exponents
                )));
            }
            if !t.coefficient.is_finite() {
                return Err(Error::contract(format!("term {:?} has a non-finite coefficient", t.exponents)));
            }
            let pos = basis.iter().position(|b| *b == t.exponents).expect("degree checked");
            if slots[pos].is_some() {
                return Err(Error::contract(format!("duplicate term {:?}", t.exponents)));
            }
            slots[pos] = Some(t);
        }
        let terms = slots.into_iter().map(|s| s.expect("count and uniqueness checked")).collect();
        Ok(SymbolicEquation {
            target: target.into(),
            base_features,
            degree,
            terms,
            diagnostics: None,
        })
    }

    pub fn with_diagnostics(mut self, diagnostics: FitDiagnostics) -> Self {
        self.diagnostics = Some(diagnostics);
        self
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    pub fn base_features(&self) -> &[String] {
        &self.base_features
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn diagnostics(&self) -> Option<&FitDiagnostics> {
        self.diagnostics.as_ref()
    }

    pub fn intercept(&self) -> f64 {
        self.terms[0].coefficient
    }

    /// Coefficients in graded-lex order, intercept first.
    pub fn coefficients(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.coefficient).collect()
    }

    pub fn coefficient(&self, exponents: &[u32]) -> Option<f64> {
        self.terms.iter().find(|t| t.exponents == exponents).map(|t| t.coefficient)
    }

    /// Evaluates at base-feature values given in `base_features` order.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.base_features.len() {
            return Err(Error::contract(format!(
                "equation takes {} inputs, got {}",
                self.base_features.len(),
                x.len()
            )));
        }
        Ok(self
            .terms
            .iter()
            .fold(0.0, |acc, t| acc + t.coefficient * monomial_value(x, &t.exponents)))
    }

    /// Evaluates at base-feature values looked up by name.
    pub fn evaluate_named(&self, values: &BTreeMap<String, f64>) -> Result<f64> {
        let x = self
            .base_features
            .iter()
            .map(|name| {
                values.get(name).copied().ok_or_else(|| {
                    Error::contract(format!("missing value for base feature `{name}`"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        self.evaluate(&x)
    }

    /// The feature spec implied by the base-feature names, when they name
    /// dataset inputs (`Power`, `log_Velocity`, ...).
    pub fn feature_spec(&self) -> Result<FeatureSpec> {
        FeatureSpec::from_names(&self.base_features)
    }

    /// Evaluates from raw field values, applying the transforms encoded in
    /// the base-feature names.
    pub fn evaluate_raw(&self, lookup: impl Fn(Field) -> Option<f64>) -> Result<f64> {
        let x = self.feature_spec()?.transform_row(lookup)?;
        self.evaluate(&x)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&EquationJson::from(self)).expect("equation serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: EquationJson = serde_json::from_str(text)?;
        raw.try_into()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json() + "\n")
            .map_err(|source| Error::Io { path: path.to_path_buf(), source })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text)
    }
}

/// Evaluates `eq` at named base-feature values.
pub fn evaluate_equation(eq: &SymbolicEquation, x: &BTreeMap<String, f64>) -> Result<f64> {
    eq.evaluate_named(x)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EquationJson {
    target: String,
    base_features: Vec<String>,
    degree: u32,
    intercept: f64,
    terms: Vec<Term>,
    train_r2: Option<f64>,
}

impl From<&SymbolicEquation> for EquationJson {
    fn from(eq: &SymbolicEquation) -> Self {
        EquationJson {
            target: eq.target.clone(),
            base_features: eq.base_features.clone(),
            degree: eq.degree,
            intercept: eq.intercept(),
            terms: eq.terms[1..].to_vec(),
            train_r2: eq.diagnostics.map(|d| d.train_r2),
        }
    }
}

impl TryFrom<EquationJson> for SymbolicEquation {
    type Error = Error;

    fn try_from(raw: EquationJson) -> Result<Self> {
        if raw.terms.iter().any(Term::is_intercept) {
            return Err(Error::contract(
                "`terms` must not contain the all-zero exponent vector; use `intercept`",
            ));
        }
        let d = raw.base_features.len();
        let mut terms = Vec::with_capacity(raw.terms.len() + 1);
        terms.push(Term { exponents: vec![0; d], coefficient: raw.intercept });
        terms.extend(raw.terms);
        let eq = SymbolicEquation::new(raw.target, raw.base_features, raw.degree, terms)?;
        Ok(match raw.train_r2 {
            Some(r2) => eq.with_diagnostics(FitDiagnostics { train_r2: r2, rank: None, rank_deficient: None }),
            None => eq,
        })
    }
}

impl Serialize for SymbolicEquation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        EquationJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymbolicEquation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        EquationJson::deserialize(d)?.try_into().map_err(serde::de::Error::custom)
    }
}
