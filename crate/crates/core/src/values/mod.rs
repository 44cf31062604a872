//! Value understanding: per-feature checks and distribution factors.

pub mod acf;
pub mod decompose;
pub mod formats;
pub mod missing;
pub mod outliers;
pub mod spikes;
pub mod stats;

pub use acf::autocorrelation;
pub use decompose::{
    decompose, detect_seasonality, DecompositionModel, DecompositionResult, SeasonalityResult,
};
pub use formats::{
    check_formats, classify_forms, FeatureForm, FeatureFormat, FormClassification,
    FormDistribution, FormatCheck,
};
pub use missing::{analyze_missing, MissingReport, MissingSpan, SpanClass};
pub use outliers::{detect_outliers, OutlierReport};
pub use spikes::{detect_spikes, SpikeEvent, SpikeReport};
pub use stats::{
    categorical_profile, continuous_profile, moments, quantile_sorted, CategoricalProfile,
    ContinuousProfile, Moments,
};
