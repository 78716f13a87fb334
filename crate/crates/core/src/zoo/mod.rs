//! Published melt-pool and spatter equations as ready-to-evaluate values.
//!
//! Coefficients are stored exactly as printed, with no re-rounding. The
//! equations are only claimed valid over the calibration envelope
//! `P ∈ [50, 500] W`, `V ∈ [100, 2000] mm/s`; outside it predictions are
//! returned unchanged and flagged.

mod tables;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::Serialize;

use crate::dataset::{FeatureEntry, FeatureSpec, Field};
use crate::error::{Error, Result};
use crate::polyfit::{equation_to_string, format_number, FitDiagnostics, FormatOptions, SymbolicEquation};

/// Calibrated power range in W.
pub const POWER_ENVELOPE: (f64, f64) = (50.0, 500.0);
/// Calibrated velocity range in mm/s.
pub const VELOCITY_ENVELOPE: (f64, f64) = (100.0, 2000.0);

#[derive(Clone, Debug, Serialize)]
pub struct ZooEntry {
    pub id: &'static str,
    pub target: Field,
    pub input_set: FeatureSpec,
    pub equation: SymbolicEquation,
    /// Degree as reported alongside the R² values; may differ from the
    /// degree of the printed equation.
    pub reported_degree: u32,
    pub reported_r2_train: f64,
    pub reported_r2_test: f64,
    /// A printed constant that is not part of the evaluated equation.
    pub dangling_constant: Option<f64>,
    pub notes: &'static [&'static str],
}

impl ZooEntry {
    /// The equation in published-table layout (4 decimals, small values in
    /// scientific notation), including any dangling constant after the
    /// intercept.
    pub fn printed_form(&self) -> String {
        let full = equation_to_string(&self.equation, &FormatOptions::tabulated());
        let Some(c) = self.dangling_constant else {
            return full;
        };
        let style = FormatOptions::tabulated().style;
        let intercept = self.equation.intercept();
        let head = format!("{}{}", if intercept < 0.0 { "−" } else { "" }, format_number(intercept.abs(), style));
        let sign = if c < 0.0 { " − " } else { " + " };
        let rest = &full[head.len()..];
        format!("{head}{sign}{}{rest}", format_number(c.abs(), style))
    }

    /// Evaluates from raw input values; logs are applied as the input set requires.
    pub fn evaluate(&self, lookup: impl Fn(Field) -> Option<f64>) -> Result<f64> {
        self.equation.evaluate_raw(lookup)
    }
}

fn pv() -> FeatureSpec {
    FeatureSpec::power_velocity()
}

fn spec(entries: Vec<FeatureEntry>) -> FeatureSpec {
    FeatureSpec::new(entries).expect("zoo input sets are valid")
}

fn entry(
    id: &'static str,
    target: Field,
    input_set: FeatureSpec,
    degree: u32,
    coefficients: &[f64],
    reported: (u32, f64, f64),
) -> ZooEntry {
    let equation = SymbolicEquation::from_coefficients(target.key(), input_set.names(), degree, coefficients)
        .expect("zoo coefficient counts match their degree")
        .with_diagnostics(FitDiagnostics {
            train_r2: reported.1,
            rank: None,
            rank_deficient: None,
        });
    ZooEntry {
        id,
        target,
        input_set,
        equation,
        reported_degree: reported.0,
        reported_r2_train: reported.1,
        reported_r2_test: reported.2,
        dangling_constant: None,
        notes: &[],
    }
}

fn build() -> Vec<ZooEntry> {
    use FeatureEntry as E;
    use Field::*;
    let pvlogv = spec(vec![E::identity(Power), E::identity(Velocity), E::log(Velocity)]);
    let dims = spec(vec![E::identity(Length), E::identity(Width), E::identity(Depth)]);
    let logdims = spec(vec![E::log(Length), E::identity(Width), E::identity(Depth), E::log(Width), E::log(Depth)]);
    vec![
        entry("length_pv", Length, pv(), 3, &tables::LENGTH_PV, (3, 0.98, 0.95)),
        ZooEntry {
            notes: &["printed equation is quartic while the reported degree is 5"],
            ..entry("width_pv", Width, pv(), 4, &tables::WIDTH_PV, (5, 0.95, 0.95))
        },
        entry("depth_pv", Depth, pv(), 2, &tables::DEPTH_PV, (2, 0.99, 0.99)),
        entry("area_pv", CrossSection, pv(), 2, &tables::AREA_PV, (2, 0.99, 0.99)),
        ZooEntry {
            notes: &["intercept is printed identically for spatter_logdims"],
            ..entry("volume_pv", Volume, pv(), 2, &tables::VOLUME_PV, (2, 0.98, 0.97))
        },
        ZooEntry {
            dangling_constant: Some(-0.1273),
            notes: &["a second constant, -0.1273, is printed after the intercept; it is kept as metadata and not evaluated"],
            ..entry("spatter_pv", Spatter, pv(), 6, &tables::SPATTER_PV, (6, 0.83, 0.75))
        },
        entry("spatter_pvlogv", Spatter, pvlogv, 6, &tables::SPATTER_PVLOGV, (6, 0.9, 0.79)),
        entry("spatter_dims", Spatter, dims, 3, &tables::SPATTER_DIMS, (3, 0.8, 0.71)),
        ZooEntry {
            notes: &["intercept is printed identically for volume_pv"],
            ..entry("spatter_logdims", Spatter, logdims, 2, &tables::SPATTER_LOGDIMS, (2, 0.85, 0.82))
        },
    ]
}

/// All nine reference equations, in a fixed order.
pub fn list_models() -> &'static [ZooEntry] {
    static MODELS: OnceLock<Vec<ZooEntry>> = OnceLock::new();
    MODELS.get_or_init(build)
}

pub fn model_ids() -> Vec<&'static str> {
    list_models().iter().map(|e| e.id).collect()
}

pub fn get(id: &str) -> Result<&'static ZooEntry> {
    list_models().iter().find(|e| e.id == id).ok_or_else(|| Error::UnknownModel {
        id: id.to_string(),
        valid: model_ids().iter().map(|s| s.to_string()).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeltPoolPrediction {
    /// µm
    pub length: f64,
    /// µm
    pub width: f64,
    /// µm
    pub depth: f64,
    /// µm²
    pub cross_section: f64,
    /// µm³
    pub volume: f64,
    pub out_of_envelope: bool,
    pub warnings: Vec<String>,
}

/// Whether `(power, velocity)` lies inside the calibration envelope.
pub fn in_envelope(power: f64, velocity: f64) -> bool {
    (POWER_ENVELOPE.0..=POWER_ENVELOPE.1).contains(&power)
        && (VELOCITY_ENVELOPE.0..=VELOCITY_ENVELOPE.1).contains(&velocity)
}

fn check_process(power: f64, velocity: f64) -> Result<()> {
    if !(power.is_finite() && power > 0.0) {
        return Err(Error::domain(format!("power must be finite and > 0, got {power}")));
    }
    if !(velocity.is_finite() && velocity > 0.0) {
        return Err(Error::domain(format!("velocity must be finite and > 0, got {velocity}")));
    }
    Ok(())
}

fn envelope_warning(power: f64, velocity: f64) -> String {
    format!(
        "(P, V) = ({power}, {velocity}) lies outside the calibration envelope P ∈ [{}, {}] W, V ∈ [{}, {}] mm/s",
        POWER_ENVELOPE.0, POWER_ENVELOPE.1, VELOCITY_ENVELOPE.0, VELOCITY_ENVELOPE.1
    )
}

/// Evaluates the five melt-pool equations at one process condition.
pub fn predict_melt_pool(power: f64, velocity: f64) -> Result<MeltPoolPrediction> {
    check_process(power, velocity)?;
    let x = [power, velocity];
    let eval = |id: &str| get(id)?.equation.evaluate(&x);
    let mut p = MeltPoolPrediction {
        length: eval("length_pv")?,
        width: eval("width_pv")?,
        depth: eval("depth_pv")?,
        cross_section: eval("area_pv")?,
        volume: eval("volume_pv")?,
        out_of_envelope: !in_envelope(power, velocity),
        warnings: Vec::new(),
    };
    if p.out_of_envelope {
        p.warnings.push(envelope_warning(power, velocity));
    }
    for (name, v) in [
        ("length", p.length),
        ("width", p.width),
        ("depth", p.depth),
        ("cross_section", p.cross_section),
        ("volume", p.volume),
    ] {
        if v < 0.0 {
            p.warnings.push(format!("predicted {name} is negative ({v})"));
        }
    }
    Ok(p)
}

/// Parses `{name: value}` inputs keyed by field name or alias.
pub fn parse_inputs(values: &BTreeMap<String, f64>) -> Result<BTreeMap<Field, f64>> {
    values
        .iter()
        .map(|(k, &v)| {
            let f: Field = k.parse()?;
            if !v.is_finite() {
                return Err(Error::domain(format!("input `{k}` is not finite")));
            }
            // Process parameters are strictly positive; dimensions may be zero.
            let positive = matches!(f, Field::Power | Field::Velocity);
            if v < 0.0 || (positive && v == 0.0) {
                let bound = if positive { "> 0" } else { ">= 0" };
                return Err(Error::domain(format!("input `{k}` must be {bound}, got {v}")));
            }
            Ok((f, v))
        })
        .collect()
}

/// Evaluates one zoo equation from raw inputs such as `{"power": 200, "velocity": 800}`.
pub fn predict(id: &str, values: &BTreeMap<String, f64>) -> Result<f64> {
    let entry = get(id)?;
    let inputs = parse_inputs(values)?;
    entry.evaluate(|f| inputs.get(&f).copied())
}

/// [`predict`] restricted to the spatter equations.
pub fn predict_spatter(id: &str, values: &BTreeMap<String, f64>) -> Result<f64> {
    let entry = get(id)?;
    if entry.target != Field::Spatter {
        return Err(Error::contract(format!("`{id}` does not predict spatter")));
    }
    predict(id, values)
}
