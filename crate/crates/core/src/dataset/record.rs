use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One column of the process-map table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    Power,
    Velocity,
    Length,
    Width,
    Depth,
    CrossSection,
    Volume,
    Spatter,
}

impl Field {
    pub const ALL: [Field; 8] = [
        Field::Power,
        Field::Velocity,
        Field::Length,
        Field::Width,
        Field::Depth,
        Field::CrossSection,
        Field::Volume,
        Field::Spatter,
    ];

    /// Exact CSV header name, unit suffix included.
    pub fn csv_header(self) -> &'static str {
        match self {
            Field::Power => "power_W",
            Field::Velocity => "velocity_mm_s",
            Field::Length => "length_um",
            Field::Width => "width_um",
            Field::Depth => "depth_um",
            Field::CrossSection => "cross_section_um2",
            Field::Volume => "volume_um3",
            Field::Spatter => "spatter_um3",
        }
    }

    /// Snake-case identifier used in JSON and on the command line.
    pub fn key(self) -> &'static str {
        match self {
            Field::Power => "power",
            Field::Velocity => "velocity",
            Field::Length => "length",
            Field::Width => "width",
            Field::Depth => "depth",
            Field::CrossSection => "cross_section",
            Field::Volume => "volume",
            Field::Spatter => "spatter",
        }
    }

    /// Capitalised name used for design-matrix columns, e.g. `Velocity`.
    pub fn column_name(self) -> &'static str {
        match self {
            Field::Power => "Power",
            Field::Velocity => "Velocity",
            Field::Length => "Length",
            Field::Width => "Width",
            Field::Depth => "Depth",
            Field::CrossSection => "Cross_Section",
            Field::Volume => "Volume",
            Field::Spatter => "Spatter",
        }
    }

    /// One-letter symbol used when printing equations.
    pub fn symbol(self) -> &'static str {
        match self {
            Field::Power => "P",
            Field::Velocity => "V",
            Field::Length => "L",
            Field::Width => "W",
            Field::Depth => "D",
            Field::CrossSection => "A",
            Field::Volume => "Vol",
            Field::Spatter => "S",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Field::Power => "W",
            Field::Velocity => "mm/s",
            Field::Length | Field::Width | Field::Depth => "µm",
            Field::CrossSection => "µm²",
            Field::Volume | Field::Spatter => "µm³",
        }
    }

    /// Fields that may appear as model inputs.
    pub fn is_input(self) -> bool {
        matches!(
            self,
            Field::Power | Field::Velocity | Field::Length | Field::Width | Field::Depth
        )
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let field = match lower.as_str() {
            "power" | "power_w" | "p" => Field::Power,
            "velocity" | "velocity_mm_s" | "v" => Field::Velocity,
            "length" | "length_um" | "l" => Field::Length,
            "width" | "width_um" | "w" => Field::Width,
            "depth" | "depth_um" | "d" => Field::Depth,
            "cross_section" | "cross_section_um2" | "area" => Field::CrossSection,
            "volume" | "volume_um3" => Field::Volume,
            "spatter" | "spatter_um3" => Field::Spatter,
            _ => {
                return Err(Error::contract(format!(
                    "unknown field `{s}`; expected one of {}",
                    Field::ALL.map(Field::key).join(", ")
                )))
            }
        };
        Ok(field)
    }
}

/// One simulated process condition and its measured melt-pool outcome.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProcessMapRecord {
    /// Laser power, W.
    pub power: f64,
    /// Scan speed, mm/s.
    pub velocity: f64,
    /// Average melt-pool length, µm.
    pub length: f64,
    /// Average melt-pool width, µm.
    pub width: f64,
    /// Average melt-pool depth, µm.
    pub depth: f64,
    /// Average cross-sectional area, µm².
    pub cross_section: f64,
    /// Average melt-pool volume, µm³.
    pub volume: f64,
    /// Volume indicated as spatter, µm³.
    pub spatter: f64,
}

impl ProcessMapRecord {
    pub fn from_values(v: [f64; 8]) -> Self {
        ProcessMapRecord {
            power: v[0],
            velocity: v[1],
            length: v[2],
            width: v[3],
            depth: v[4],
            cross_section: v[5],
            volume: v[6],
            spatter: v[7],
        }
    }

    /// Values in CSV column order.
    pub fn values(&self) -> [f64; 8] {
        [
            self.power,
            self.velocity,
            self.length,
            self.width,
            self.depth,
            self.cross_section,
            self.volume,
            self.spatter,
        ]
    }

    pub fn get(&self, field: Field) -> f64 {
        match field {
            Field::Power => self.power,
            Field::Velocity => self.velocity,
            Field::Length => self.length,
            Field::Width => self.width,
            Field::Depth => self.depth,
            Field::CrossSection => self.cross_section,
            Field::Volume => self.volume,
            Field::Spatter => self.spatter,
        }
    }

    pub fn set(&mut self, field: Field, value: f64) {
        match field {
            Field::Power => self.power = value,
            Field::Velocity => self.velocity = value,
            Field::Length => self.length = value,
            Field::Width => self.width = value,
            Field::Depth => self.depth = value,
            Field::CrossSection => self.cross_section = value,
            Field::Volume => self.volume = value,
            Field::Spatter => self.spatter = value,
        }
    }

    /// Checks the record invariants; the message names the offending column.
    pub fn validate(&self) -> std::result::Result<(), String> {
        self.check(false)
    }

    /// Like [`validate`](Self::validate) but measurements may be negative:
    /// published polynomials dip below zero in parts of the envelope and
    /// synthetic targets keep those values.
    pub fn validate_synthetic(&self) -> std::result::Result<(), String> {
        self.check(true)
    }

    fn check(&self, allow_negative: bool) -> std::result::Result<(), String> {
        for field in Field::ALL {
            let v = self.get(field);
            if !v.is_finite() {
                return Err(format!("{} is not finite ({v})", field.csv_header()));
            }
            match field {
                Field::Power | Field::Velocity if v <= 0.0 => {
                    return Err(format!("{} must be > 0, got {v}", field.csv_header()));
                }
                _ if v < 0.0 && !allow_negative => {
                    return Err(format!("{} must be >= 0, got {v}", field.csv_header()));
                }
                _ => {}
            }
        }
        Ok(())
    }
}
