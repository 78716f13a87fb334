use std::fmt::Write as _;
use std::path::Path;

use super::{Dataset, Field, ProcessMapRecord};
use crate::error::{Error, Result};

const PROVENANCE_PREFIX: &str = "# provenance:";

/// The exact header line, in column order.
pub fn csv_header() -> String {
    Field::ALL.map(Field::csv_header).join(",")
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    parse_csv(&text, &format!("file:{}", path.display()))
}

/// Parses CSV text. Leading `#` comment lines are skipped; a
/// `# provenance: ...` line replaces `default_provenance`.
pub fn parse_csv(text: &str, default_provenance: &str) -> Result<Dataset> {
    let mut provenance = default_provenance.to_string();
    let mut skipped = 0usize;
    let mut body_start = 0usize;
    for line in text.split_inclusive('\n') {
        let trimmed = line.trim_start();
        if !trimmed.starts_with('#') {
            break;
        }
        if let Some(rest) = trimmed.strip_prefix(PROVENANCE_PREFIX) {
            provenance = rest.trim().to_string();
        }
        skipped += 1;
        body_start += line.len();
    }
    let body = &text[body_start..];

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());

    let found: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let expected: Vec<String> = Field::ALL.iter().map(|f| f.csv_header().to_string()).collect();
    if found != expected {
        return Err(Error::Schema { expected, found });
    }

    let mut records = Vec::new();
    let mut lines = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row?;
        let row_no = i + 1;
        if row.len() != expected.len() {
            return Err(Error::Validation {
                row: row_no,
                message: format!("expected {} cells, found {}", expected.len(), row.len()),
            });
        }
        let mut values = [0.0; 8];
        for (j, cell) in row.iter().enumerate() {
            values[j] = cell.parse::<f64>().map_err(|_| Error::Parse {
                row: row_no,
                column: expected[j].clone(),
                value: cell.to_string(),
            })?;
        }
        records.push(ProcessMapRecord::from_values(values));
        // 1-based file line: comments + header + data row.
        let line = row.position().map_or(skipped + 1 + row_no, |p| p.line() as usize + skipped);
        lines.push(line);
    }
    Dataset::with_lines(records, provenance, &lines)
}

/// Serialises with shortest round-trip float formatting.
pub fn to_csv_string(ds: &Dataset) -> String {
    let mut out = String::new();
    if !ds.provenance.is_empty() {
        let _ = writeln!(out, "{PROVENANCE_PREFIX} {}", ds.provenance.replace('\n', " "));
    }
    out.push_str(&csv_header());
    out.push('\n');
    for r in &ds.records {
        let cells: Vec<String> = r.values().iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn write_csv(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_csv_string(ds))
        .map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn good_csv() -> String {
        format!(
            "{}\n200,800,300,100,80,5000,1e6,2000\n250,900,310,105,85,5100,1.1e6,2100\n300,1000,320,110,90,5200,1.2e6,2200\n",
            csv_header()
        )
    }

    #[test]
    fn well_formed_three_rows() {
        let ds = parse_csv(&good_csv(), "test").unwrap();
        assert_eq!(ds.len(), 3);
        assert_eq!(ds.records[1].velocity, 900.0);
        assert_eq!(ds.provenance, "test");
    }

    #[test]
    fn renamed_header_is_schema_error() {
        let text = good_csv().replacen("power_W", "Power", 1);
        match parse_csv(&text, "t").unwrap_err() {
            Error::Schema { expected, found } => {
                assert_eq!(expected[0], "power_W");
                assert_eq!(found[0], "Power");
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn missing_column_is_schema_error() {
        let text = "power_W,velocity_mm_s\n1,2\n";
        assert!(matches!(parse_csv(text, "t"), Err(Error::Schema { .. })));
    }

    #[test]
    fn zero_velocity_on_row_seven() {
        let mut text = csv_header() + "\n";
        for i in 1..=8 {
            let v = if i == 7 { 0.0 } else { 100.0 * i as f64 };
            text += &format!("{},{v},1,1,1,1,1,1\n", 50 * i);
        }
        match parse_csv(&text, "t").unwrap_err() {
            Error::Validation { row, message } => {
                assert_eq!(row, 7);
                assert!(message.contains("velocity_mm_s"));
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn non_numeric_cell_reports_row_and_column() {
        let text = good_csv().replacen("310", "abc", 1);
        match parse_csv(&text, "t").unwrap_err() {
            Error::Parse { row, column, value } => {
                assert_eq!((row, column.as_str(), value.as_str()), (2, "length_um", "abc"));
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn duplicates_report_line_numbers() {
        let text = format!(
            "# provenance: dup test\n{}\n200,800,1,1,1,1,1,1\n300,800,1,1,1,1,1,1\n200,800,2,2,2,2,2,2\n",
            csv_header()
        );
        match parse_csv(&text, "t").unwrap_err() {
            Error::Duplicate { first_line, second_line, .. } => {
                assert_eq!((first_line, second_line), (3, 5));
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn provenance_comment_is_read_and_written() {
        let ds = parse_csv(&format!("# provenance: synthetic seed=7\n{}", good_csv()), "x").unwrap();
        assert_eq!(ds.provenance, "synthetic seed=7");
        let text = to_csv_string(&ds);
        assert!(text.starts_with("# provenance: synthetic seed=7\npower_W,"));
        assert_eq!(parse_csv(&text, "y").unwrap(), ds);
    }
}
