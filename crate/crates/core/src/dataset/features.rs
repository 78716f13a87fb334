use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Dataset, Field};
use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    Identity,
    NaturalLog,
}

/// One design column: a raw input field and the transform applied to it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureEntry {
    pub field: Field,
    pub transform: Transform,
}

impl FeatureEntry {
    pub fn identity(field: Field) -> Self {
        FeatureEntry { field, transform: Transform::Identity }
    }

    pub fn log(field: Field) -> Self {
        FeatureEntry { field, transform: Transform::NaturalLog }
    }

    /// Design column name: `Velocity` or `log_Velocity`.
    pub fn name(&self) -> String {
        match self.transform {
            Transform::Identity => self.field.column_name().to_string(),
            Transform::NaturalLog => format!("log_{}", self.field.column_name()),
        }
    }

    /// Printing symbol: `V` or `log V`.
    pub fn symbol(&self) -> String {
        match self.transform {
            Transform::Identity => self.field.symbol().to_string(),
            Transform::NaturalLog => format!("log {}", self.field.symbol()),
        }
    }

    pub fn apply(&self, raw: f64) -> Result<f64> {
        match self.transform {
            Transform::Identity => Ok(raw),
            Transform::NaturalLog if raw > 0.0 => Ok(raw.ln()),
            Transform::NaturalLog => Err(Error::domain(format!(
                "{} requires {} > 0, got {raw}",
                self.name(),
                self.field.key()
            ))),
        }
    }
}

impl fmt::Display for FeatureEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for FeatureEntry {
    type Err = Error;

    /// Accepts `velocity`, `Velocity`, `log_velocity`, `log(velocity)`, `ln_V`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let lower = t.to_ascii_lowercase();
        let (rest, transform) = if let Some(r) = lower.strip_prefix("log_").or(lower.strip_prefix("ln_")) {
            (r.to_string(), Transform::NaturalLog)
        } else if let Some(r) = lower.strip_prefix("log(").and_then(|r| r.strip_suffix(')')) {
            (r.to_string(), Transform::NaturalLog)
        } else {
            (lower.clone(), Transform::Identity)
        };
        let field: Field = rest.parse()?;
        if !field.is_input() {
            return Err(Error::contract(format!(
                "`{t}` is not an input feature; inputs are power, velocity, length, width, depth"
            )));
        }
        Ok(FeatureEntry { field, transform })
    }
}

/// Ordered, duplicate-free list of design columns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<FeatureEntry>", into = "Vec<FeatureEntry>")]
pub struct FeatureSpec {
    entries: Vec<FeatureEntry>,
}

impl TryFrom<Vec<FeatureEntry>> for FeatureSpec {
    type Error = Error;

    fn try_from(entries: Vec<FeatureEntry>) -> Result<Self> {
        FeatureSpec::new(entries)
    }
}

impl From<FeatureSpec> for Vec<FeatureEntry> {
    fn from(spec: FeatureSpec) -> Self {
        spec.entries
    }
}

impl FeatureSpec {
    pub fn new(entries: Vec<FeatureEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::contract("feature spec needs at least one entry"));
        }
        for (i, e) in entries.iter().enumerate() {
            if !e.field.is_input() {
                return Err(Error::contract(format!("`{}` cannot be a model input", e.field)));
            }
            if entries[..i].contains(e) {
                return Err(Error::contract(format!("feature `{}` listed twice", e.name())));
            }
        }
        Ok(FeatureSpec { entries })
    }

    /// `[Power, Velocity]`
    pub fn power_velocity() -> Self {
        FeatureSpec {
            entries: vec![FeatureEntry::identity(Field::Power), FeatureEntry::identity(Field::Velocity)],
        }
    }

    /// Parses a comma-separated list such as `power,velocity,log_velocity`.
    pub fn parse_list(s: &str) -> Result<Self> {
        let entries = s
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(str::parse)
            .collect::<Result<Vec<_>>>()?;
        FeatureSpec::new(entries)
    }

    /// Rebuilds a spec from design column names (`Power`, `log_Velocity`, ...).
    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        FeatureSpec::new(names.iter().map(|n| n.as_ref().parse()).collect::<Result<Vec<_>>>()?)
    }

    pub fn entries(&self) -> &[FeatureEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.entries.iter().map(FeatureEntry::name).collect()
    }

    /// Raw fields the spec reads, deduplicated in first-use order.
    pub fn raw_fields(&self) -> Vec<Field> {
        let mut out = Vec::new();
        for e in &self.entries {
            if !out.contains(&e.field) {
                out.push(e.field);
            }
        }
        out
    }

    /// Transforms one raw observation; `lookup` supplies raw field values.
    pub fn transform_row(&self, lookup: impl Fn(Field) -> Option<f64>) -> Result<Vec<f64>> {
        self.entries
            .iter()
            .map(|e| {
                let raw = lookup(e.field).ok_or_else(|| {
                    Error::contract(format!("missing input `{}`", e.field.key()))
                })?;
                e.apply(raw)
            })
            .collect()
    }
}

impl fmt::Display for FeatureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.names().join(", "))
    }
}

/// Design matrix with one column per spec entry, in spec order.
pub fn build_design(ds: &Dataset, spec: &FeatureSpec) -> Result<(DenseMatrix, Vec<String>)> {
    let d = spec.len();
    let mut data = Vec::with_capacity(ds.len() * d);
    for (i, r) in ds.records.iter().enumerate() {
        for e in spec.entries() {
            let v = e.apply(r.get(e.field)).map_err(|err| match err {
                Error::Domain(m) => Error::domain(format!("record {i}: {m}")),
                other => other,
            })?;
            data.push(v);
        }
    }
    Ok((DenseMatrix::from_row_major(ds.len(), d, data)?, spec.names()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::ProcessMapRecord;

    fn ds(rows: &[(f64, f64)]) -> Dataset {
        let recs = rows
            .iter()
            .map(|&(p, v)| ProcessMapRecord::from_values([p, v, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]))
            .collect();
        Dataset::new(recs, "t").unwrap()
    }

    #[test]
    fn identity_columns() {
        let (x, names) = build_design(&ds(&[(200.0, 800.0)]), &FeatureSpec::power_velocity()).unwrap();
        assert_eq!(x.row(0), &[200.0, 800.0]);
        assert_eq!(names, ["Power", "Velocity"]);
    }

    #[test]
    fn log_of_e_is_one() {
        let spec = FeatureSpec::parse_list("log_velocity").unwrap();
        let (x, _) = build_design(&ds(&[(1.0, std::f64::consts::E)]), &spec).unwrap();
        assert!((x.get(0, 0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn log_velocity_naming() {
        let spec = FeatureSpec::parse_list("power, velocity, log_velocity").unwrap();
        assert_eq!(spec.names(), ["Power", "Velocity", "log_Velocity"]);
        let dims = FeatureSpec::parse_list("log_Length,Width,Depth,log_Width,log_Depth").unwrap();
        assert_eq!(dims.names(), ["log_Length", "Width", "Depth", "log_Width", "log_Depth"]);
        assert_eq!(FeatureSpec::from_names(&dims.names()).unwrap(), dims);
    }

    #[test]
    fn log_of_zero_reports_record() {
        let mut d = ds(&[(100.0, 100.0), (200.0, 200.0)]);
        d.records[1].length = 0.0;
        let err = build_design(&d, &FeatureSpec::parse_list("log_length").unwrap()).unwrap_err();
        assert!(matches!(err, Error::Domain(ref m) if m.contains("record 1")));
    }

    #[test]
    fn spec_rejects_duplicates_and_outputs() {
        assert!(FeatureSpec::parse_list("power,power").is_err());
        assert!(FeatureSpec::parse_list("power,log_power").is_ok());
        assert!(FeatureSpec::parse_list("spatter").is_err());
        assert!(FeatureSpec::parse_list("").is_err());
    }
}
