//! Loading delimited sensor exports into a [`Dataset`].

use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use chrono::{DateTime, NaiveDate, NaiveDateTime, SecondsFormat, Utc};
use log::{debug, warn};
use serde::{Deserialize, Serialize};

use crate::config::{
    validate_schema_definition, FeatureKind, FeatureSchema, ProfilerConfig, StorageFormat,
    TimestampFormat,
};
use crate::error::{Error, Result};
use crate::series::{Cell, Dataset, Feature, FormatViolation, Instant, TimedSeries};

const BUILTIN_MISSING: [&str; 4] = ["", "na", "nan", "null"];

/// Parses a raw timestamp into epoch milliseconds.
///
/// ISO-8601 accepts a `T` or space separator, optional fractional seconds
/// and an optional `Z`/offset suffix; values without an offset are UTC.
/// Returns `None` when the text does not conform.
pub fn parse_timestamp(raw: &str, format: &TimestampFormat) -> Option<Instant> {
    let raw = raw.trim();
    match format {
        TimestampFormat::Iso8601 => parse_iso(raw),
        TimestampFormat::EpochSeconds => {
            if let Ok(s) = raw.parse::<i64>() {
                return s.checked_mul(1000);
            }
            let s: f64 = raw.parse().ok()?;
            s.is_finite().then(|| (s * 1000.0).round() as i64)
        }
        TimestampFormat::EpochMilliseconds => raw.parse::<i64>().ok(),
        TimestampFormat::Custom(pattern) => {
            if let Ok(dt) = DateTime::parse_from_str(raw, pattern) {
                return Some(dt.timestamp_millis());
            }
            if let Ok(dt) = NaiveDateTime::parse_from_str(raw, pattern) {
                return Some(dt.and_utc().timestamp_millis());
            }
            NaiveDate::parse_from_str(raw, pattern)
                .ok()
                .and_then(|d| d.and_hms_opt(0, 0, 0))
                .map(|dt| dt.and_utc().timestamp_millis())
        }
    }
}

fn parse_iso(raw: &str) -> Option<Instant> {
    if let Ok(dt) = DateTime::parse_from_rfc3339(raw) {
        return Some(dt.timestamp_millis());
    }
    for pattern in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(raw, pattern) {
            return Some(dt.and_utc().timestamp_millis());
        }
    }
    for pattern in ["%Y-%m-%d %H:%M:%S%.f%:z", "%Y-%m-%d %H:%M:%S%.f%z"] {
        if let Ok(dt) = DateTime::parse_from_str(raw, pattern) {
            return Some(dt.timestamp_millis());
        }
    }
    NaiveDate::parse_from_str(raw, "%Y-%m-%d")
        .ok()
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .map(|dt| dt.and_utc().timestamp_millis())
}

/// Canonical rendering: RFC 3339 in UTC, milliseconds only when non-zero.
pub fn render_timestamp(t: Instant) -> String {
    match DateTime::<Utc>::from_timestamp_millis(t) {
        Some(dt) if t.rem_euclid(1000) == 0 => dt.to_rfc3339_opts(SecondsFormat::Secs, true),
        Some(dt) => dt.to_rfc3339_opts(SecondsFormat::Millis, true),
        None => t.to_string(),
    }
}

/// Parses one cell under the declared format. `Err(())` marks a format
/// violation; missing tokens must be filtered out beforehand.
pub fn parse_cell(text: &str, schema: &FeatureSchema) -> std::result::Result<Cell, ()> {
    let categorical = schema.kind == FeatureKind::Categorical;
    match schema.expected_format {
        StorageFormat::Integer => {
            let v: i64 = text.parse().map_err(|_| ())?;
            Ok(if categorical {
                Cell::Cat(v.to_string())
            } else {
                Cell::Num(v as f64)
            })
        }
        StorageFormat::Float => {
            let v: f64 = text.parse().map_err(|_| ())?;
            if !v.is_finite() {
                return Err(());
            }
            Ok(if categorical {
                Cell::Cat(text.to_string())
            } else {
                Cell::Num(v)
            })
        }
        StorageFormat::Boolean => {
            let b = match text.to_ascii_lowercase().as_str() {
                "true" | "1" | "yes" | "on" => true,
                "false" | "0" | "no" | "off" => false,
                _ => return Err(()),
            };
            Ok(Cell::Cat(b.to_string()))
        }
        StorageFormat::Timestamp => parse_iso(text)
            .map(|t| Cell::Cat(render_timestamp(t)))
            .ok_or(()),
        StorageFormat::CategoryText => Ok(Cell::Cat(text.to_string())),
    }
}

struct MissingTokens(Vec<String>);

impl MissingTokens {
    fn new(config: &ProfilerConfig) -> Self {
        let mut tokens: Vec<String> = BUILTIN_MISSING.iter().map(|s| s.to_string()).collect();
        tokens.extend(config.missing_tokens.iter().map(|s| s.trim().to_ascii_lowercase()));
        MissingTokens(tokens)
    }

    fn contains(&self, text: &str) -> bool {
        // Fast path for the common numeric cell.
        if text.len() > 4 && self.0.iter().all(|t| t.len() <= 4) {
            return false;
        }
        self.0.iter().any(|t| t.eq_ignore_ascii_case(text))
    }
}

/// Loads a delimited text export.
///
/// Rows are stably sorted by timestamp. Cells that fail to parse under the
/// declared format become missing and are recorded as violations.
pub fn load_dataset<R: Read>(
    name: &str,
    source: R,
    schema: &[FeatureSchema],
    config: &ProfilerConfig,
) -> Result<Dataset> {
    validate_schema_definition(schema)?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(config.delimiter as u8)
        .has_headers(true)
        .flexible(true)
        .from_reader(source);

    let header = reader.byte_headers()?.clone();
    if header.is_empty() {
        return Err(Error::EmptyInput);
    }
    let column_of: HashMap<&[u8], usize> = header
        .iter()
        .enumerate()
        .map(|(i, h)| (trim_bytes(h), i))
        .rev()
        .collect();
    let ts_col = *column_of
        .get(config.timestamp_column.as_bytes())
        .ok_or_else(|| {
            Error::Schema(format!(
                "timestamp column {:?} not found in header",
                config.timestamp_column
            ))
        })?;
    let feature_cols: Vec<usize> = schema
        .iter()
        .map(|f| {
            column_of.get(f.name.as_bytes()).copied().ok_or_else(|| {
                Error::Schema(format!("feature {:?} not found in header", f.name))
            })
        })
        .collect::<Result<_>>()?;

    let missing = MissingTokens::new(config);
    let mut timestamps: Vec<Instant> = Vec::new();
    let mut columns: Vec<Vec<Cell>> = vec![Vec::new(); schema.len()];
    let mut violations = Vec::new();
    let mut record = csv::ByteRecord::new();
    let mut row = 0usize;
    while reader.read_byte_record(&mut record)? {
        let raw_ts = field_str(&record, ts_col);
        let ts = parse_timestamp(raw_ts, &config.timestamp_format).ok_or_else(|| {
            Error::Timestamp {
                row,
                raw: raw_ts.to_string(),
                format: config.timestamp_format.to_string(),
            }
        })?;
        timestamps.push(ts);
        for ((feature, &col), out) in schema.iter().zip(&feature_cols).zip(columns.iter_mut()) {
            let text = field_str(&record, col).trim();
            if missing.contains(text) {
                out.push(Cell::Missing);
                continue;
            }
            match parse_cell(text, feature) {
                Ok(cell) => out.push(cell),
                Err(()) => {
                    debug!(
                        "row {row}: {:?} is not a valid {} for {}",
                        text, feature.expected_format, feature.name
                    );
                    violations.push(FormatViolation {
                        feature: feature.name.clone(),
                        row,
                        text: text.to_string(),
                        expected_format: feature.expected_format,
                    });
                    out.push(Cell::Missing);
                }
            }
        }
        row += 1;
    }
    if row == 0 {
        return Err(Error::EmptyInput);
    }
    for f in schema {
        let n = violations.iter().filter(|v| v.feature == f.name).count();
        if n > 0 {
            warn!("{}: {n} cells violate declared format {}", f.name, f.expected_format);
        }
    }

    let mut order: Vec<usize> = (0..row).collect();
    if !timestamps.windows(2).all(|w| w[0] <= w[1]) {
        order.sort_by_key(|&i| timestamps[i]);
    }
    let sorted_ts: Vec<Instant> = order.iter().map(|&i| timestamps[i]).collect();
    let ni = 1 + sorted_ts.windows(2).filter(|w| w[0] != w[1]).count();

    let features = schema
        .iter()
        .zip(columns)
        .map(|(f, col)| {
            let values = if order.iter().enumerate().all(|(i, &j)| i == j) {
                col
            } else {
                let mut col: Vec<Option<Cell>> = col.into_iter().map(Some).collect();
                order.iter().map(|&i| col[i].take().unwrap()).collect()
            };
            Feature {
                schema: f.clone(),
                series: TimedSeries::new(sorted_ts.clone(), values),
            }
        })
        .collect();

    Ok(Dataset {
        name: name.to_string(),
        features,
        ni,
        source_rows: order,
        violations,
    })
}

pub fn load_dataset_path(
    path: &Path,
    schema: &[FeatureSchema],
    config: &ProfilerConfig,
) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    load_dataset(&name, std::io::BufReader::new(file), schema, config).map_err(|e| match e {
        Error::Csv(err) if err.is_io_error() => match err.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            _ => unreachable!(),
        },
        other => other,
    })
}

fn trim_bytes(b: &[u8]) -> &[u8] {
    let s = std::str::from_utf8(b).unwrap_or("");
    s.trim().as_bytes()
}

fn field_str(record: &csv::ByteRecord, col: usize) -> &str {
    record
        .get(col)
        .and_then(|b| std::str::from_utf8(b).ok())
        .unwrap_or("")
}

/// Format violations of one feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureViolations {
    pub feature: String,
    pub violations: Vec<FormatViolation>,
}

/// Re-checks every non-missing cell of the dataset against `schema`.
///
/// Cells that failed at load time are re-parsed from their original text,
/// so a schema that differs from the load-time one is checked faithfully.
/// Features absent from the dataset are skipped. Never fails.
pub fn validate_schema(ds: &Dataset, schema: &[FeatureSchema]) -> Vec<FeatureViolations> {
    let mut out = Vec::new();
    for declared in schema {
        let Some(feature) = ds.feature(&declared.name) else {
            continue;
        };
        let failed: HashMap<usize, &str> = ds
            .violations_for(&declared.name)
            .map(|v| (v.row, v.text.as_str()))
            .collect();
        let mut violations = Vec::new();
        for (pos, cell) in feature.series.values.iter().enumerate() {
            let row = ds.source_rows[pos];
            let text = match (failed.get(&row), cell) {
                (Some(t), _) => (*t).to_string(),
                (None, Cell::Missing) => continue,
                (None, Cell::Num(v)) => v.to_string(),
                (None, Cell::Cat(t)) => t.clone(),
            };
            if parse_cell(&text, declared).is_err() {
                violations.push(FormatViolation {
                    feature: declared.name.clone(),
                    row,
                    text,
                    expected_format: declared.expected_format,
                });
            }
        }
        violations.sort_by_key(|v| v.row);
        out.push(FeatureViolations {
            feature: declared.name.clone(),
            violations,
        });
    }
    out
}
