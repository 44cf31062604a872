//! Dataset-level evaluation scores for the six data characteristics.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::features::CorrelationMatrix;
use crate::values::FormDistribution;

/// Variety score: a finite ratio or positive infinity when all data is
/// structured. Serialises infinity as the token `"+inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Variety {
    Finite(f64),
    Infinite,
}

impl Variety {
    pub fn as_f64(self) -> f64 {
        match self {
            Variety::Finite(v) => v,
            Variety::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for Variety {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variety::Finite(v) => write!(f, "{v}"),
            Variety::Infinite => f.write_str("+inf"),
        }
    }
}

impl Serialize for Variety {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Variety::Finite(v) => s.serialize_f64(*v),
            Variety::Infinite => s.serialize_str("+inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Variety {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Token(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(Variety::Finite(v)),
            Repr::Token(t) if t == "+inf" => Ok(Variety::Infinite),
            Repr::Token(t) => Err(serde::de::Error::custom(format!("invalid variety {t:?}"))),
        }
    }
}

/// Vol: number of features times number of instances.
pub fn score_volume(nf: u64, ni: u64) -> u128 {
    nf as u128 * ni as u128
}

/// Varie: structured over non-structured volume.
pub fn score_variety(fd: &FormDistribution) -> Variety {
    let other = fd.pud + fd.pssd;
    if other <= 0.0 {
        Variety::Infinite
    } else {
        Variety::Finite(fd.psd / other)
    }
}

/// Vel: the configured speed of data producing, in seconds.
pub fn score_velocity(expected_interval: f64) -> f64 {
    expected_interval
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VeracityInputs {
    pub pcdf: f64,
    /// Mean abnormal spike count per feature.
    pub mean_nas: f64,
    pub ni: u64,
    pub mean_pti: f64,
    /// Mean missing share per feature, measured on the raw series.
    pub mean_pmv: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VeracityScore {
    pub ver: f64,
    /// Weighted-sum terms before weighting: format, spikes, intervals, missing.
    pub terms: [f64; 4],
}

/// Ver: weighted sum of format errors, spike rate, irregular intervals and
/// missing share. `None` when `ni <= 2`.
pub fn score_veracity(inputs: &VeracityInputs, weights: [f64; 4]) -> Option<VeracityScore> {
    if inputs.ni <= 2 {
        return None;
    }
    let terms = [
        1.0 - inputs.pcdf,
        inputs.mean_nas / (inputs.ni - 2) as f64,
        1.0 - inputs.mean_pti,
        inputs.mean_pmv,
    ];
    let ver = terms.iter().zip(weights).map(|(t, w)| t * w).sum();
    Some(VeracityScore { ver, terms })
}

/// Val: invalid indicator slots over attempted slots.
pub fn score_value(invalid: usize, attempted: usize) -> Option<f64> {
    (attempted > 0).then(|| invalid as f64 / attempted as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariabilityScore {
    pub varia: Option<f64>,
    pub nstd: f64,
    pub po: f64,
    pub vc: Option<f64>,
}

/// Mean of min-max scaled standard deviations. Equal stds scale to zero.
pub fn normalized_std(stds: &[f64]) -> Option<f64> {
    let lo = stds.iter().copied().reduce(f64::min)?;
    let hi = stds.iter().copied().reduce(f64::max)?;
    let range = hi - lo;
    let scaled = stds.iter().map(|s| if range > 0.0 { (s - lo) / range } else { 0.0 });
    Some(scaled.sum::<f64>() / stds.len() as f64)
}

/// Varia from per-feature stds, per-feature outlier rates and the share of
/// highly correlated pairs. Returns `None` without any defined std.
pub fn score_variability(
    stds: &[f64],
    rates: &[f64],
    vc: Option<f64>,
    weights: [f64; 3],
) -> Option<VariabilityScore> {
    let nstd = normalized_std(stds)?;
    let po = if rates.is_empty() {
        0.0
    } else {
        rates.iter().sum::<f64>() / rates.len() as f64
    };
    let varia = vc.map(|vc| nstd * weights[0] + po * weights[1] + (1.0 - vc) * weights[2]);
    Some(VariabilityScore {
        varia,
        nstd,
        po,
        vc,
    })
}

/// [`score_variability`] with `vc` taken from a correlation matrix.
pub fn score_variability_with_matrix(
    stds: &[f64],
    rates: &[f64],
    matrix: &CorrelationMatrix,
    threshold: f64,
    weights: [f64; 3],
) -> Option<VariabilityScore> {
    score_variability(stds, rates, matrix.high_correlation_fraction(threshold), weights)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SixVsScores {
    pub vol: u64,
    pub varie: Variety,
    /// Seconds.
    pub vel: f64,
    pub ver: Option<f64>,
    pub val: Option<f64>,
    pub varia: Option<f64>,
    pub components: ScoreComponents,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreComponents {
    pub veracity_terms: Option<[f64; 4]>,
    pub nstd: Option<f64>,
    pub po: Option<f64>,
    pub vc: Option<f64>,
    pub invalid_indicators: usize,
    pub attempted_indicators: usize,
}
