use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller broke an operation's precondition (shapes, ranges, missing inputs).
    #[error("contract violation: {0}")]
    Contract(String),

    /// The inputs are well-formed but the quantity is undefined for them.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("schema error: expected header [{}], found [{}]", expected.join(","), found.join(","))]
    Schema { expected: Vec<String>, found: Vec<String> },

    #[error("parse error at row {row}, column `{column}`: cannot read `{value}` as a number")]
    Parse { row: usize, column: String, value: String },

    #[error("validation error at row {row}: {message}")]
    Validation { row: usize, message: String },

    #[error("duplicate process condition (power={power}, velocity={velocity}) on lines {first_line} and {second_line}")]
    Duplicate { power: f64, velocity: f64, first_line: usize, second_line: usize },

    #[error("unknown model `{id}`; valid ids: {}", valid.join(", "))]
    UnknownModel { id: String, valid: Vec<String> },

    /// A request exceeds a size limit (sweep resolution, upload size).
    #[error("too large: {0}")]
    TooLarge(String),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Short machine-readable code, used by the HTTP layer.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Contract(_) => "contract_violation",
            Error::Domain(_) => "domain_error",
            Error::Schema { .. } => "schema_error",
            Error::Parse { .. } => "parse_error",
            Error::Validation { .. } => "validation_error",
            Error::Duplicate { .. } => "duplicate_record",
            Error::UnknownModel { .. } => "unknown_model",
            Error::TooLarge(_) => "too_large",
            Error::Io { .. } => "io_error",
            Error::Csv(_) => "csv_error",
            Error::Json(_) => "json_error",
        }
    }
}
