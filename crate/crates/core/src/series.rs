//! In-memory model of a timestamped sensor dataset.
//!
//! Timestamps are integer milliseconds since the Unix epoch. Every feature
//! carries its own [`TimedSeries`] over the shared row index, so a row that
//! lacks a reading for one feature simply holds [`Cell::Missing`] there.

use serde::{Deserialize, Serialize};

use crate::config::FeatureSchema;

/// Milliseconds since the Unix epoch.
pub type Instant = i64;

/// A span of time in milliseconds.
pub type Millis = i64;

pub const MILLIS_PER_SECOND: i64 = 1000;

pub fn seconds_to_millis(seconds: f64) -> Millis {
    (seconds * MILLIS_PER_SECOND as f64).round() as Millis
}

pub fn millis_to_seconds(ms: Millis) -> f64 {
    ms as f64 / MILLIS_PER_SECOND as f64
}

/// One observation of a feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Cat(String),
    Missing,
}

impl Cell {
    pub fn is_missing(&self) -> bool {
        matches!(self, Cell::Missing)
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            _ => None,
        }
    }

    /// Value equality used for duplicate classification: numeric equality
    /// for numbers, token equality for categories.
    pub fn same_value(&self, other: &Cell) -> bool {
        match (self, other) {
            (Cell::Num(a), Cell::Num(b)) => a == b,
            (Cell::Cat(a), Cell::Cat(b)) => a == b,
            (Cell::Missing, Cell::Missing) => true,
            _ => false,
        }
    }
}

/// A single feature's (timestamp, value) sequence.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TimedSeries {
    pub timestamps: Vec<Instant>,
    pub values: Vec<Cell>,
}

impl TimedSeries {
    pub fn new(timestamps: Vec<Instant>, values: Vec<Cell>) -> Self {
        assert_eq!(
            timestamps.len(),
            values.len(),
            "timestamps and values must have equal length"
        );
        TimedSeries { timestamps, values }
    }

    pub fn from_numbers(timestamps: Vec<Instant>, values: &[Option<f64>]) -> Self {
        let values = values
            .iter()
            .map(|v| v.map_or(Cell::Missing, Cell::Num))
            .collect();
        Self::new(timestamps, values)
    }

    /// Regularly spaced numeric series starting at zero.
    pub fn regular(interval: Millis, values: &[f64]) -> Self {
        let timestamps = (0..values.len() as i64).map(|i| i * interval).collect();
        Self::new(timestamps, values.iter().copied().map(Cell::Num).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn missing_count(&self) -> usize {
        self.values.iter().filter(|c| c.is_missing()).count()
    }

    pub fn present_count(&self) -> usize {
        self.len() - self.missing_count()
    }

    /// Numeric view with `None` for missing (and non-numeric) cells.
    pub fn numeric(&self) -> Vec<Option<f64>> {
        self.values.iter().map(Cell::as_f64).collect()
    }

    /// Non-missing numeric values in series order.
    pub fn present_numbers(&self) -> Vec<f64> {
        self.values.iter().filter_map(Cell::as_f64).collect()
    }

    /// Numeric view where categorical tokens are replaced by the index of
    /// their first occurrence. Used for ACF and seasonality on categories.
    pub fn coded(&self) -> Vec<Option<f64>> {
        let mut seen: Vec<&str> = Vec::new();
        self.values
            .iter()
            .map(|c| match c {
                Cell::Num(v) => Some(*v),
                Cell::Cat(tok) => {
                    let code = match seen.iter().position(|s| *s == tok.as_str()) {
                        Some(i) => i,
                        None => {
                            seen.push(tok);
                            seen.len() - 1
                        }
                    };
                    Some(code as f64)
                }
                Cell::Missing => None,
            })
            .collect()
    }

    pub fn is_sorted(&self) -> bool {
        self.timestamps.windows(2).all(|w| w[0] <= w[1])
    }
}

/// A feature column: its declared schema plus its observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Feature {
    pub schema: FeatureSchema,
    pub series: TimedSeries,
}

/// A cell that failed to parse under its feature's declared format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormatViolation {
    pub feature: String,
    /// Zero-based data row in file order (the header is not counted).
    pub row: usize,
    pub text: String,
    pub expected_format: crate::config::StorageFormat,
}

/// A loaded dataset. Rows are sorted by timestamp; equal timestamps keep
/// their file order.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub features: Vec<Feature>,
    /// Number of distinct row timestamps.
    pub ni: usize,
    /// File-order row index of each sorted row.
    pub source_rows: Vec<usize>,
    pub violations: Vec<FormatViolation>,
}

impl Dataset {
    pub fn nf(&self) -> usize {
        self.features.len()
    }

    /// Number of data rows, duplicates included.
    pub fn rows(&self) -> usize {
        self.source_rows.len()
    }

    pub fn feature(&self, name: &str) -> Option<&Feature> {
        self.features.iter().find(|f| f.schema.name == name)
    }

    pub fn violations_for<'a>(
        &'a self,
        feature: &'a str,
    ) -> impl Iterator<Item = &'a FormatViolation> + 'a {
        self.violations.iter().filter(move |v| v.feature == feature)
    }
}
