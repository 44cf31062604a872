//! IQR fence outlier detection.

use serde::{Deserialize, Serialize};

use crate::config::QuantileMethod;
use crate::series::TimedSeries;
use crate::values::stats::quantile_sorted;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutlierReport {
    pub q1: f64,
    pub q3: f64,
    pub iqr: f64,
    pub lower: f64,
    pub upper: f64,
    pub coefficient: f64,
    /// Series positions of the detected outliers.
    pub indices: Vec<usize>,
    /// Outliers over non-missing values.
    pub rate: f64,
    /// Values outside the fences before the physical bounds were applied.
    pub fence_violations: usize,
    pub bounds: Option<(f64, f64)>,
}

impl OutlierReport {
    pub fn count(&self) -> usize {
        self.indices.len()
    }
}

pub const MIN_OUTLIER_SAMPLES: usize = 4;

/// Flags values strictly outside `[q1 - c*iqr, q3 + c*iqr]`.
///
/// With physical `bounds`, a fence violation only counts when the value
/// also lies outside the bounds. Returns `None` for fewer than four values.
pub fn detect_outliers(
    s: &TimedSeries,
    coefficient: f64,
    method: QuantileMethod,
    bounds: Option<(f64, f64)>,
) -> Option<OutlierReport> {
    let mut sorted = s.present_numbers();
    if sorted.len() < MIN_OUTLIER_SAMPLES {
        return None;
    }
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile_sorted(&sorted, 0.25, method)?;
    let q3 = quantile_sorted(&sorted, 0.75, method)?;
    let iqr = q3 - q1;
    let lower = q1 - coefficient * iqr;
    let upper = q3 + coefficient * iqr;
    let mut fence_violations = 0;
    let indices: Vec<usize> = s
        .values
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.as_f64().map(|v| (i, v)))
        .filter(|&(_, v)| v < lower || v > upper)
        .inspect(|_| fence_violations += 1)
        .filter(|&(_, v)| bounds.is_none_or(|(lo, hi)| v < lo || v > hi))
        .map(|(i, _)| i)
        .collect();
    Some(OutlierReport {
        q1,
        q3,
        iqr,
        lower,
        upper,
        coefficient,
        rate: indices.len() as f64 / sorted.len() as f64,
        indices,
        fence_violations,
        bounds,
    })
}
