//! Process-map records, CSV ingestion, design matrices, splitting, and
//! synthetic data generation.

mod csv_io;
mod features;
mod record;
mod synth;

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use csv_io::{csv_header, load_csv, parse_csv, to_csv_string, write_csv};
pub use features::{build_design, FeatureEntry, FeatureSpec, Transform};
pub use record::{Field, ProcessMapRecord};
pub use synth::{synth_generate, SynthOptions};

use crate::error::{Error, Result};

pub const DEFAULT_TEST_FRACTION: f64 = 0.2;
pub const DEFAULT_SEED: u64 = 42;

/// Magnitude of a velocity vector from its three components.
pub fn velocity_magnitude(vx: f64, vy: f64, vz: f64) -> Result<f64> {
    if !(vx.is_finite() && vy.is_finite() && vz.is_finite()) {
        return Err(Error::contract("velocity components must be finite"));
    }
    Ok((vx * vx + vy * vy + vz * vz).sqrt())
}

/// Provenance prefix of generated datasets.
pub const SYNTHETIC_PREFIX: &str = "synthetic";

/// Validated, immutable collection of process-map records.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub records: Vec<ProcessMapRecord>,
    pub provenance: String,
}

impl Dataset {
    /// Validates every record and rejects duplicate `(power, velocity)` pairs.
    /// Row numbers in errors are 1-based. A provenance starting with
    /// `synthetic` admits negative measurements.
    pub fn new(records: Vec<ProcessMapRecord>, provenance: impl Into<String>) -> Result<Self> {
        let lines: Vec<usize> = (1..=records.len()).collect();
        Self::with_lines(records, provenance.into(), &lines)
    }

    pub(crate) fn with_lines(
        records: Vec<ProcessMapRecord>,
        provenance: String,
        lines: &[usize],
    ) -> Result<Self> {
        let synthetic = provenance.starts_with(SYNTHETIC_PREFIX);
        let mut seen: HashMap<(u64, u64), usize> = HashMap::with_capacity(records.len());
        for (i, r) in records.iter().enumerate() {
            let checked = if synthetic { r.validate_synthetic() } else { r.validate() };
            checked.map_err(|message| Error::Validation { row: i + 1, message })?;
            // +0.0 normalises the sign of zero; power and velocity are positive anyway.
            let key = ((r.power + 0.0).to_bits(), (r.velocity + 0.0).to_bits());
            if let Some(&first) = seen.get(&key) {
                return Err(Error::Duplicate {
                    power: r.power,
                    velocity: r.velocity,
                    first_line: lines[first],
                    second_line: lines[i],
                });
            }
            seen.insert(key, i);
        }
        Ok(Dataset { records, provenance })
    }

    pub fn is_synthetic(&self) -> bool {
        self.provenance.starts_with(SYNTHETIC_PREFIX)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn column(&self, field: Field) -> Vec<f64> {
        self.records.iter().map(|r| r.get(field)).collect()
    }

    /// Every column, named by its CSV header.
    pub fn named_columns(&self) -> Vec<(String, Vec<f64>)> {
        Field::ALL
            .iter()
            .map(|&f| (f.csv_header().to_string(), self.column(f)))
            .collect()
    }

    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            records: idx.iter().map(|&i| self.records[i]).collect(),
            provenance: self.provenance.clone(),
        }
    }

    pub(crate) fn require_fit_size(&self) -> Result<()> {
        if self.len() < 2 {
            return Err(Error::contract(format!(
                "fitting needs at least 2 records, dataset has {}",
                self.len()
            )));
        }
        Ok(())
    }
}

/// Deterministic shuffled split of `0..n`. Returns `(train, test)` index
/// lists, each ascending.
pub fn split_indices(n: usize, test_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::contract(format!(
            "test fraction must lie in (0, 1), got {test_fraction}"
        )));
    }
    if n < 5 {
        return Err(Error::contract(format!("splitting needs at least 5 records, got {n}")));
    }
    let n_test = ((test_fraction * n as f64).round() as usize).clamp(1, n - 1);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut test = idx[..n_test].to_vec();
    let mut train = idx[n_test..].to_vec();
    test.sort_unstable();
    train.sort_unstable();
    Ok((train, test))
}

/// Splits into `(train, test)`; test size is `round(test_fraction * n)`, at least 1.
pub fn train_test_split(ds: &Dataset, test_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    let (train, test) = split_indices(ds.len(), test_fraction, seed)?;
    Ok((ds.subset(&train), ds.subset(&test)))
}
