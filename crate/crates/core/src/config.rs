//! Feature schema and profiler configuration.
//!
//! Both are plain JSON documents. Durations are given in seconds.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{seconds_to_millis, Millis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Continuous,
    Categorical,
}

/// Storage format a feature's cells are expected to have.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StorageFormat {
    Integer,
    Float,
    Boolean,
    Timestamp,
    CategoryText,
}

impl std::fmt::Display for StorageFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StorageFormat::Integer => "integer",
            StorageFormat::Float => "float",
            StorageFormat::Boolean => "boolean",
            StorageFormat::Timestamp => "timestamp",
            StorageFormat::CategoryText => "category-text",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataForm {
    Structured,
    SemiStructured,
    Unstructured,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub name: String,
    pub kind: FeatureKind,
    pub expected_format: StorageFormat,
    #[serde(default = "default_form")]
    pub expected_form: DataForm,
}

fn default_form() -> DataForm {
    DataForm::Structured
}

impl FeatureSchema {
    pub fn continuous(name: impl Into<String>) -> Self {
        FeatureSchema {
            name: name.into(),
            kind: FeatureKind::Continuous,
            expected_format: StorageFormat::Float,
            expected_form: DataForm::Structured,
        }
    }

    pub fn categorical(name: impl Into<String>) -> Self {
        FeatureSchema {
            name: name.into(),
            kind: FeatureKind::Categorical,
            expected_format: StorageFormat::CategoryText,
            expected_form: DataForm::Structured,
        }
    }

    pub fn is_numeric(&self) -> bool {
        self.kind == FeatureKind::Continuous
    }
}

/// Checks name uniqueness and kind/format compatibility.
pub fn validate_schema_definition(schema: &[FeatureSchema]) -> Result<()> {
    let mut seen = HashSet::new();
    for f in schema {
        if f.name.is_empty() {
            return Err(Error::Schema("feature name must not be empty".into()));
        }
        if !seen.insert(f.name.as_str()) {
            return Err(Error::Schema(format!("duplicate feature name {:?}", f.name)));
        }
        if f.kind == FeatureKind::Continuous
            && !matches!(
                f.expected_format,
                StorageFormat::Integer | StorageFormat::Float
            )
        {
            return Err(Error::Schema(format!(
                "continuous feature {:?} must use integer or float format, not {}",
                f.name, f.expected_format
            )));
        }
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SchemaDocument {
    List(Vec<FeatureSchema>),
    Wrapped { features: Vec<FeatureSchema> },
}

/// Parses a schema document: either a JSON array of features or an object
/// with a `features` array.
pub fn parse_schema(json: &str) -> Result<Vec<FeatureSchema>> {
    let doc: SchemaDocument =
        serde_json::from_str(json).map_err(|e| Error::Schema(e.to_string()))?;
    let features = match doc {
        SchemaDocument::List(f) | SchemaDocument::Wrapped { features: f } => f,
    };
    validate_schema_definition(&features)?;
    Ok(features)
}

pub fn load_schema(path: &Path) -> Result<Vec<FeatureSchema>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_schema(&text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuantileMethod {
    /// Linear interpolation between order statistics at `(n - 1) p`.
    #[default]
    Linear,
    Lower,
    Higher,
    Nearest,
    Midpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MergePolicy {
    First,
    Mean,
    #[default]
    Median,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationMode {
    /// Largest signed correlation.
    #[default]
    Signed,
    /// Largest correlation magnitude; the sign of the winner is kept.
    Absolute,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimestampFormat {
    #[default]
    Iso8601,
    EpochSeconds,
    EpochMilliseconds,
    /// A chrono `strftime` pattern interpreted as UTC.
    Custom(String),
}

impl std::fmt::Display for TimestampFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TimestampFormat::Iso8601 => f.write_str("iso8601"),
            TimestampFormat::EpochSeconds => f.write_str("epoch-seconds"),
            TimestampFormat::EpochMilliseconds => f.write_str("epoch-milliseconds"),
            TimestampFormat::Custom(p) => write!(f, "custom({p})"),
        }
    }
}

/// Profiler settings. Every duration is in seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfilerConfig {
    /// Configured update interval of the acquisition system (SDP).
    pub expected_interval: f64,
    #[serde(default)]
    pub interval_tolerance: f64,
    #[serde(default = "default_sms_max")]
    pub sms_max: f64,
    #[serde(default = "default_mms_max")]
    pub mms_max: f64,
    #[serde(default = "default_outlier_coefficient")]
    pub outlier_coefficient: f64,
    #[serde(default)]
    pub quantile_method: QuantileMethod,
    #[serde(default = "default_spike_k")]
    pub spike_k: f64,
    /// Absolute physical bounds per feature name.
    #[serde(default)]
    pub spike_bounds: BTreeMap<String, (f64, f64)>,
    #[serde(default = "default_correlation_threshold")]
    pub correlation_threshold: f64,
    #[serde(default = "default_max_cross_delay")]
    pub max_cross_delay: f64,
    #[serde(default)]
    pub correlation_mode: CorrelationMode,
    #[serde(default = "default_max_acf_lag")]
    pub max_acf_lag: usize,
    /// Candidate seasonal periods, in samples.
    #[serde(default)]
    pub seasonal_periods: Vec<usize>,
    #[serde(default = "default_seasonal_tolerance")]
    pub seasonal_tolerance: f64,
    #[serde(default = "default_veracity_weights")]
    pub veracity_weights: [f64; 4],
    #[serde(default = "default_variability_weights")]
    pub variability_weights: [f64; 3],
    #[serde(default)]
    pub duplicate_policy: MergePolicy,
    #[serde(default)]
    pub grid_policy: MergePolicy,
    /// Grid start override (epoch seconds).
    #[serde(default)]
    pub grid_start: Option<f64>,
    /// Grid end override (epoch seconds).
    #[serde(default)]
    pub grid_end: Option<f64>,
    #[serde(default = "default_timestamp_column")]
    pub timestamp_column: String,
    #[serde(default)]
    pub timestamp_format: TimestampFormat,
    #[serde(default = "default_delimiter")]
    pub delimiter: char,
    /// Extra tokens treated as missing, in addition to the built-in ones.
    #[serde(default)]
    pub missing_tokens: Vec<String>,
    /// Recording interval the application needs; a slower SDP is flagged.
    #[serde(default)]
    pub required_interval: Option<f64>,
    /// Vol above which an informational volume note is emitted.
    #[serde(default)]
    pub volume_threshold: Option<u64>,
    /// Seed for randomized diagnostics. Recorded in the report.
    #[serde(default)]
    pub seed: u64,
}

fn default_sms_max() -> f64 {
    1800.0
}
fn default_mms_max() -> f64 {
    21600.0
}
fn default_outlier_coefficient() -> f64 {
    1.5
}
fn default_spike_k() -> f64 {
    6.0
}
fn default_correlation_threshold() -> f64 {
    0.7
}
fn default_max_cross_delay() -> f64 {
    300.0
}
fn default_max_acf_lag() -> usize {
    60
}
fn default_seasonal_tolerance() -> f64 {
    0.05
}
fn default_veracity_weights() -> [f64; 4] {
    [0.25; 4]
}
fn default_variability_weights() -> [f64; 3] {
    [1.0 / 3.0; 3]
}
fn default_timestamp_column() -> String {
    "timestamp".into()
}
fn default_delimiter() -> char {
    ','
}

impl Default for ProfilerConfig {
    fn default() -> Self {
        Self::with_interval(1.0)
    }
}

const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

impl ProfilerConfig {
    pub fn with_interval(expected_interval: f64) -> Self {
        ProfilerConfig {
            expected_interval,
            interval_tolerance: 0.0,
            sms_max: default_sms_max(),
            mms_max: default_mms_max(),
            outlier_coefficient: default_outlier_coefficient(),
            quantile_method: QuantileMethod::default(),
            spike_k: default_spike_k(),
            spike_bounds: BTreeMap::new(),
            correlation_threshold: default_correlation_threshold(),
            max_cross_delay: default_max_cross_delay(),
            correlation_mode: CorrelationMode::default(),
            max_acf_lag: default_max_acf_lag(),
            seasonal_periods: Vec::new(),
            seasonal_tolerance: default_seasonal_tolerance(),
            veracity_weights: default_veracity_weights(),
            variability_weights: default_variability_weights(),
            duplicate_policy: MergePolicy::default(),
            grid_policy: MergePolicy::default(),
            grid_start: None,
            grid_end: None,
            timestamp_column: default_timestamp_column(),
            timestamp_format: TimestampFormat::default(),
            delimiter: default_delimiter(),
            missing_tokens: Vec::new(),
            required_interval: None,
            volume_threshold: None,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.expected_interval > 0.0) || self.interval_ms() <= 0 {
            return bad(format!(
                "expected_interval must be positive, got {}",
                self.expected_interval
            ));
        }
        if !(self.interval_tolerance >= 0.0) {
            return bad("interval_tolerance must be non-negative".into());
        }
        if !(self.sms_max > 0.0 && self.sms_max < self.mms_max) {
            return bad(format!(
                "need 0 < sms_max < mms_max, got {} and {}",
                self.sms_max, self.mms_max
            ));
        }
        let vw: f64 = self.veracity_weights.iter().sum();
        if (vw - 1.0).abs() > WEIGHT_SUM_TOLERANCE || self.veracity_weights.iter().any(|w| *w < 0.0)
        {
            return bad(format!("veracity_weights must be non-negative and sum to 1, sum is {vw}"));
        }
        let aw: f64 = self.variability_weights.iter().sum();
        if (aw - 1.0).abs() > WEIGHT_SUM_TOLERANCE
            || self.variability_weights.iter().any(|w| *w < 0.0)
        {
            return bad(format!(
                "variability_weights must be non-negative and sum to 1, sum is {aw}"
            ));
        }
        if !(self.outlier_coefficient >= 0.0) {
            return bad("outlier_coefficient must be non-negative".into());
        }
        if !(self.spike_k > 0.0) {
            return bad("spike_k must be positive".into());
        }
        if !(self.max_cross_delay >= 0.0) {
            return bad("max_cross_delay must be non-negative".into());
        }
        if self.seasonal_periods.iter().any(|p| *p < 2) {
            return bad("seasonal periods must be at least 2".into());
        }
        for (name, (lo, hi)) in &self.spike_bounds {
            if !(lo <= hi) {
                return bad(format!("spike_bounds for {name:?}: min {lo} exceeds max {hi}"));
            }
        }
        if let (Some(s), Some(e)) = (self.grid_start, self.grid_end) {
            if s > e {
                return bad("grid_start after grid_end".into());
            }
        }
        if !self.delimiter.is_ascii() {
            return bad("delimiter must be a single ASCII character".into());
        }
        Ok(())
    }

    pub fn interval_ms(&self) -> Millis {
        seconds_to_millis(self.expected_interval)
    }

    pub fn tolerance_ms(&self) -> Millis {
        seconds_to_millis(self.interval_tolerance)
    }

    pub fn sms_max_ms(&self) -> Millis {
        seconds_to_millis(self.sms_max)
    }

    pub fn mms_max_ms(&self) -> Millis {
        seconds_to_millis(self.mms_max)
    }

    /// Number of grid steps scanned on each side in cross-correlation.
    pub fn max_cross_lag(&self) -> usize {
        (seconds_to_millis(self.max_cross_delay) / self.interval_ms()) as usize
    }

    pub fn bounds_for(&self, feature: &str) -> Option<(f64, f64)> {
        self.spike_bounds.get(feature).copied()
    }
}

pub fn parse_config(json: &str) -> Result<ProfilerConfig> {
    let cfg: ProfilerConfig =
        serde_json::from_str(json).map_err(|e| Error::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<ProfilerConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}
