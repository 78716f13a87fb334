//! Request and response types shared by the command line and the HTTP
//! service, so both produce identical results for identical inputs.

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{build_design, train_test_split, Dataset, FeatureSpec, Field, DEFAULT_SEED, DEFAULT_TEST_FRACTION};
use crate::ensembles::{evaluate_model, fit_ensemble, EnsembleConfig, FittedModel};
use crate::error::{Error, Result};
use crate::numerics::{pearson_correlation_matrix, CorrelationMatrix, EvalReport};
use crate::polyfit::{equation_to_string, select_degree, DegreeReport, FormatOptions, SymbolicEquation, DEFAULT_DEGREES};
use crate::zoo::{self, in_envelope, POWER_ENVELOPE, VELOCITY_ENVELOPE};

pub const MIN_SWEEP_RESOLUTION: usize = 2;
pub const MAX_SWEEP_RESOLUTION: usize = 512;

/// Zoo models evaluated by a sweep when none are named.
pub const DEFAULT_SWEEP_MODELS: [&str; 6] =
    ["length_pv", "width_pv", "depth_pv", "area_pv", "volume_pv", "spatter_pv"];

/// Key under which an inline equation's values appear in a sweep.
pub const INLINE_EQUATION_KEY: &str = "equation";

/// Zoo entry metadata as listed by `GET /models`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelInfo {
    pub id: String,
    pub target: String,
    pub unit: String,
    pub inputs: Vec<String>,
    /// Raw fields a caller must supply.
    pub required_inputs: Vec<String>,
    pub degree: u32,
    pub reported_degree: u32,
    pub reported_r2_train: f64,
    pub reported_r2_test: f64,
    pub term_count: usize,
    pub equation_text: String,
    pub notes: Vec<String>,
}

pub fn model_infos() -> Vec<ModelInfo> {
    zoo::list_models()
        .iter()
        .map(|e| ModelInfo {
            id: e.id.to_string(),
            target: e.target.key().to_string(),
            unit: e.target.unit().to_string(),
            inputs: e.input_set.names(),
            required_inputs: e.input_set.raw_fields().iter().map(|f| f.key().to_string()).collect(),
            degree: e.equation.degree(),
            reported_degree: e.reported_degree,
            reported_r2_train: e.reported_r2_train,
            reported_r2_test: e.reported_r2_test,
            term_count: e.equation.terms().len(),
            equation_text: e.printed_form(),
            notes: e.notes.iter().map(|s| s.to_string()).collect(),
        })
        .collect()
}

/// Resolves a model id against the zoo, then against `extra`.
pub fn lookup_equation<'a>(
    id: &str,
    extra: &dyn Fn(&str) -> Option<Cow<'a, SymbolicEquation>>,
) -> Result<Cow<'a, SymbolicEquation>> {
    match zoo::get(id) {
        Ok(e) => Ok(Cow::Borrowed(&e.equation)),
        Err(err) => extra(id).ok_or(err),
    }
}

fn no_extra<'a>(_: &str) -> Option<Cow<'a, SymbolicEquation>> {
    None
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equation: Option<SymbolicEquation>,
    /// Raw input values keyed by field name or alias (`power`, `P`, ...).
    pub inputs: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PredictResponse {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model_id: Option<String>,
    pub target: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
    pub prediction: f64,
    pub out_of_envelope: bool,
    pub warnings: Vec<String>,
}

pub fn predict(req: &PredictRequest) -> Result<PredictResponse> {
    predict_with(req, &no_extra)
}

/// [`predict`] with extra named equations beyond the zoo.
pub fn predict_with<'a>(
    req: &'a PredictRequest,
    extra: &dyn Fn(&str) -> Option<Cow<'a, SymbolicEquation>>,
) -> Result<PredictResponse> {
    let eq: Cow<'_, SymbolicEquation> = match (&req.model_id, &req.equation) {
        (Some(id), None) => lookup_equation(id, extra)?,
        (None, Some(eq)) => Cow::Borrowed(eq),
        _ => return Err(Error::contract("give exactly one of `model_id` or `equation`")),
    };
    let inputs = zoo::parse_inputs(&req.inputs)?;
    let prediction = eq.evaluate_raw(|f| inputs.get(&f).copied())?;
    let mut warnings = Vec::new();
    let out_of_envelope = match (inputs.get(&Field::Power), inputs.get(&Field::Velocity)) {
        (Some(&p), Some(&v)) => !in_envelope(p, v),
        _ => false,
    };
    if out_of_envelope {
        warnings.push("inputs lie outside the calibration envelope".to_string());
    }
    if prediction < 0.0 {
        warnings.push(format!("prediction is negative ({prediction})"));
    }
    let target = eq.target().to_string();
    Ok(PredictResponse {
        model_id: req.model_id.clone(),
        unit: target.parse::<Field>().ok().map(|f| f.unit().to_string()),
        target,
        prediction,
        out_of_envelope,
        warnings,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisRange {
    pub min: f64,
    pub max: f64,
}

impl FromStr for AxisRange {
    type Err = Error;

    /// Parses `min:max`.
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| Error::contract(format!("expected `min:max`, got `{s}`")))?;
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::contract(format!("`{t}` is not a number")))
        };
        Ok(AxisRange { min: num(a)?, max: num(b)? })
    }
}

fn default_power() -> AxisRange {
    AxisRange { min: POWER_ENVELOPE.0, max: POWER_ENVELOPE.1 }
}

fn default_velocity() -> AxisRange {
    AxisRange { min: VELOCITY_ENVELOPE.0, max: VELOCITY_ENVELOPE.1 }
}

fn default_resolution() -> usize {
    64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRequest {
    #[serde(default = "default_power")]
    pub power: AxisRange,
    #[serde(default = "default_velocity")]
    pub velocity: AxisRange,
    /// Points per axis.
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    /// Zoo ids; defaults to [`DEFAULT_SWEEP_MODELS`] when empty and no
    /// equation is given.
    #[serde(default)]
    pub models: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equation: Option<SymbolicEquation>,
}

impl Default for SweepRequest {
    fn default() -> Self {
        SweepRequest {
            power: default_power(),
            velocity: default_velocity(),
            resolution: default_resolution(),
            models: Vec::new(),
            equation: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub power: f64,
    pub velocity: f64,
    pub out_of_envelope: bool,
    /// One value per model, keyed by model id.
    pub values: BTreeMap<String, f64>,
}

/// Predictions over a power × velocity grid. Cells are velocity-major:
/// power varies fastest, so cell `j * |power_axis| + i` is
/// `(power_axis[i], velocity_axis[j])`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub power_axis: Vec<f64>,
    pub velocity_axis: Vec<f64>,
    pub models: Vec<String>,
    pub cells: Vec<SweepCell>,
}

impl SweepGrid {
    pub fn cell(&self, power_index: usize, velocity_index: usize) -> &SweepCell {
        &self.cells[velocity_index * self.power_axis.len() + power_index]
    }
}

fn axis(name: &str, r: AxisRange, n: usize) -> Result<Vec<f64>> {
    if !(r.min.is_finite() && r.max.is_finite() && r.min > 0.0 && r.max > r.min) {
        return Err(Error::contract(format!(
            "{name} range must satisfy 0 < min < max, got {}:{}",
            r.min, r.max
        )));
    }
    let step = (r.max - r.min) / (n - 1) as f64;
    Ok((0..n).map(|i| if i == n - 1 { r.max } else { r.min + step * i as f64 }).collect())
}

pub fn sweep(req: &SweepRequest) -> Result<SweepGrid> {
    sweep_with(req, &no_extra)
}

/// [`sweep`] with extra named equations beyond the zoo.
pub fn sweep_with<'a>(
    req: &'a SweepRequest,
    extra: &dyn Fn(&str) -> Option<Cow<'a, SymbolicEquation>>,
) -> Result<SweepGrid> {
    let n = req.resolution;
    if n > MAX_SWEEP_RESOLUTION {
        return Err(Error::TooLarge(format!(
            "resolution {n} exceeds the limit of {MAX_SWEEP_RESOLUTION} per axis"
        )));
    }
    if n < MIN_SWEEP_RESOLUTION {
        return Err(Error::contract(format!("resolution must be >= {MIN_SWEEP_RESOLUTION}, got {n}")));
    }
    let power_axis = axis("power", req.power, n)?;
    let velocity_axis = axis("velocity", req.velocity, n)?;

    let mut models: Vec<(String, Cow<'_, SymbolicEquation>)> = Vec::new();
    let ids: Vec<String> = if req.models.is_empty() && req.equation.is_none() {
        DEFAULT_SWEEP_MODELS.iter().map(|s| s.to_string()).collect()
    } else {
        req.models.clone()
    };
    for id in ids {
        if models.iter().any(|(m, _)| *m == id) {
            return Err(Error::contract(format!("model `{id}` listed twice")));
        }
        let eq = lookup_equation(&id, extra)?;
        models.push((id, eq));
    }
    if let Some(eq) = &req.equation {
        models.push((INLINE_EQUATION_KEY.to_string(), Cow::Borrowed(eq)));
    }
    for (id, eq) in &models {
        let fields = eq.feature_spec()?.raw_fields();
        if let Some(f) = fields.iter().find(|f| !matches!(f, Field::Power | Field::Velocity)) {
            return Err(Error::contract(format!(
                "model `{id}` needs `{}`; sweeps only supply power and velocity",
                f.key()
            )));
        }
    }

    let rows: Vec<Vec<SweepCell>> = velocity_axis
        .par_iter()
        .map(|&v| {
            power_axis
                .iter()
                .map(|&p| {
                    let values = models
                        .iter()
                        .map(|(id, eq)| {
                            let y = eq.evaluate_raw(|f| match f {
                                Field::Power => Some(p),
                                Field::Velocity => Some(v),
                                _ => None,
                            })?;
                            Ok((id.clone(), y))
                        })
                        .collect::<Result<_>>()?;
                    Ok(SweepCell { power: p, velocity: v, out_of_envelope: !in_envelope(p, v), values })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    Ok(SweepGrid {
        power_axis,
        velocity_axis,
        models: models.into_iter().map(|(id, _)| id).collect(),
        cells: rows.into_iter().flatten().collect(),
    })
}

/// Compact JSON, the canonical wire form of a sweep.
pub fn sweep_json(grid: &SweepGrid) -> String {
    serde_json::to_string(grid).expect("sweep grid serialises")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegreeChoice {
    /// Pick from the default candidate degrees by test R².
    Auto,
    Fixed(u32),
}

impl FromStr for DegreeChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(DegreeChoice::Auto);
        }
        s.parse::<u32>()
            .map(DegreeChoice::Fixed)
            .map_err(|_| Error::contract(format!("degree must be `auto` or a positive integer, got `{s}`")))
    }
}

impl std::fmt::Display for DegreeChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DegreeChoice::Auto => f.write_str("auto"),
            DegreeChoice::Fixed(d) => write!(f, "{d}"),
        }
    }
}

impl Serialize for DegreeChoice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            DegreeChoice::Auto => s.serialize_str("auto"),
            DegreeChoice::Fixed(d) => s.serialize_u32(*d),
        }
    }
}

impl<'de> Deserialize<'de> for DegreeChoice {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u32),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(n) => Ok(DegreeChoice::Fixed(n)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

fn default_inputs() -> String {
    "Power,Velocity".to_string()
}

fn default_degree() -> DegreeChoice {
    DegreeChoice::Auto
}

fn default_test_fraction() -> f64 {
    DEFAULT_TEST_FRACTION
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitRequest {
    /// Comma-separated feature list such as `Power,Velocity,log_Velocity`.
    #[serde(default = "default_inputs")]
    pub inputs: String,
    pub target: String,
    #[serde(default = "default_degree")]
    pub degree: DegreeChoice,
    #[serde(default = "default_test_fraction")]
    pub test_fraction: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl FitRequest {
    pub fn new(target: impl Into<String>) -> Self {
        FitRequest {
            inputs: default_inputs(),
            target: target.into(),
            degree: DegreeChoice::Auto,
            test_fraction: DEFAULT_TEST_FRACTION,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FitOutcome {
    pub equation: SymbolicEquation,
    pub equation_text: String,
    pub degree: u32,
    pub report: EvalReport,
    pub degree_reports: Vec<DegreeReport>,
}

/// Fits on the training split and scores on both splits. With a fixed
/// degree only that degree is tried.
pub fn fit(ds: &Dataset, req: &FitRequest) -> Result<FitOutcome> {
    let spec = FeatureSpec::parse_list(&req.inputs)?;
    let target: Field = req.target.parse()?;
    if spec.raw_fields().contains(&target) {
        return Err(Error::contract(format!("target `{}` is also an input", target.key())));
    }
    let fixed;
    let degrees: &[u32] = match req.degree {
        DegreeChoice::Auto => &DEFAULT_DEGREES,
        DegreeChoice::Fixed(d) => {
            fixed = [d];
            &fixed
        }
    };
    let sel = select_degree(ds, &spec, target, degrees, req.test_fraction, req.seed)?;
    Ok(FitOutcome {
        equation_text: equation_to_string(&sel.equation, &FormatOptions::default()),
        degree: sel.chosen,
        report: sel.chosen_report().report,
        degree_reports: sel.reports.clone(),
        equation: sel.equation,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainRequest {
    #[serde(default = "default_inputs")]
    pub inputs: String,
    pub target: String,
    pub config: EnsembleConfig,
    #[serde(default = "default_test_fraction")]
    pub test_fraction: f64,
    /// Seed of the train/test split; the model uses `config.seed`.
    #[serde(default = "default_seed")]
    pub split_seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrainOutcome {
    pub model: FittedModel,
    pub feature_names: Vec<String>,
    pub report: EvalReport,
}

/// Fits an ensemble on the training split and scores it on both splits.
pub fn train(ds: &Dataset, req: &TrainRequest) -> Result<TrainOutcome> {
    let spec = FeatureSpec::parse_list(&req.inputs)?;
    let target: Field = req.target.parse()?;
    if spec.raw_fields().contains(&target) {
        return Err(Error::contract(format!("target `{}` is also an input", target.key())));
    }
    req.config.validate()?;
    let (train_ds, test_ds) = train_test_split(ds, req.test_fraction, req.split_seed)?;
    let (x_train, feature_names) = build_design(&train_ds, &spec)?;
    let (x_test, _) = build_design(&test_ds, &spec)?;
    let (y_train, y_test) = (train_ds.column(target), test_ds.column(target));
    let model = fit_ensemble(&x_train, &y_train, &req.config)?;
    let report = evaluate_model(&model, (&x_train, &y_train), (&x_test, &y_test))?;
    Ok(TrainOutcome { model, feature_names, report })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub correlation: CorrelationMatrix,
    /// Constant columns, for which correlation is undefined.
    pub skipped: Vec<String>,
}

/// Pearson matrix over the named CSV columns, or over every column when
/// `columns` is empty. Constant columns are dropped when not named
/// explicitly, and are an error when named.
pub fn correlate(ds: &Dataset, columns: &[String]) -> Result<CorrelationReport> {
    let all = ds.named_columns();
    let mut picked = Vec::new();
    let mut skipped = Vec::new();
    if columns.is_empty() {
        for (name, col) in all {
            if col.iter().all(|&v| v == col[0]) {
                skipped.push(name);
            } else {
                picked.push((name, col));
            }
        }
    } else {
        for name in columns {
            let field: Field = name.parse()?;
            picked.push((field.csv_header().to_string(), ds.column(field)));
        }
    }
    if picked.len() < 2 {
        return Err(Error::contract(format!(
            "correlation needs at least 2 non-constant columns, found {}",
            picked.len()
        )));
    }
    Ok(CorrelationReport { correlation: pearson_correlation_matrix(&picked)?, skipped })
}
