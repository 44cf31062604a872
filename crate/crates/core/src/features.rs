//! Feature understanding on grid-aligned data: lagged cross-correlation and
//! post-alignment missing share.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::CorrelationMode;
use crate::error::{Error, Result};
use crate::series::{Millis, TimedSeries};
use crate::values::stats::compensated_sum;

/// Minimum overlapping pairs for a lag to count.
pub const MIN_OVERLAP: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCorrelationResult {
    pub feature_a: String,
    pub feature_b: String,
    /// Best correlation over the scanned lags; `None` when no lag is defined.
    pub best_value: Option<f64>,
    /// Lag in grid steps: `a[t]` is paired with `b[t + lag]`.
    pub best_lag: i64,
}

fn centred(values: &[Option<f64>]) -> (Vec<f64>, bool) {
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    let mean = if present.is_empty() {
        0.0
    } else {
        compensated_sum(present.iter().copied()) / present.len() as f64
    };
    let gaps = present.len() != values.len();
    (
        values.iter().map(|v| v.map_or(f64::NAN, |x| x - mean)).collect(),
        gaps,
    )
}

fn is_constant(values: &[Option<f64>]) -> bool {
    let mut it = values.iter().flatten();
    match it.next() {
        Some(first) => it.all(|v| v == first),
        None => true,
    }
}

#[derive(Default)]
struct Sums {
    n: usize,
    x: f64,
    y: f64,
    xx: f64,
    yy: f64,
    xy: f64,
}

impl Sums {
    #[inline]
    fn add(&mut self, a: f64, b: f64) {
        self.n += 1;
        self.x += a;
        self.y += b;
        self.xx += a * a;
        self.yy += b * b;
        self.xy += a * b;
    }

    fn pearson(&self) -> Option<f64> {
        if self.n < MIN_OVERLAP {
            return None;
        }
        let n = self.n as f64;
        let vx = self.xx - self.x * self.x / n;
        let vy = self.yy - self.y * self.y / n;
        // Rounding leaves a tiny positive variance on constant overlaps.
        if vx <= 1e-10 * self.xx || vy <= 1e-10 * self.yy {
            return None;
        }
        let cov = self.xy - self.x * self.y / n;
        Some((cov / (vx * vy).sqrt()).clamp(-1.0, 1.0))
    }
}

/// Pearson correlation of `x[t]` with `y[t + lag]` over pairwise-present
/// positions, computed on series pre-centred by their overall means.
fn lagged_pearson(x: &[f64], y: &[f64], lag: i64, gaps: bool) -> Option<f64> {
    let n = x.len().min(y.len()) as i64;
    let (from, to) = (0.max(-lag), n.min(n - lag));
    if to - from < MIN_OVERLAP as i64 {
        return None;
    }
    let xs = &x[from as usize..to as usize];
    let ys = &y[(from + lag) as usize..(to + lag) as usize];
    let mut s = Sums::default();
    if gaps {
        for (a, b) in xs.iter().zip(ys) {
            if !a.is_nan() && !b.is_nan() {
                s.add(*a, *b);
            }
        }
    } else {
        for (a, b) in xs.iter().zip(ys) {
            s.add(*a, *b);
        }
    }
    s.pearson()
}

/// Lags in preference order: 0, -1, 1, -2, 2, ...
fn lag_order(max_lag: usize) -> impl Iterator<Item = i64> {
    std::iter::once(0).chain((1..=max_lag as i64).flat_map(|k| [-k, k]))
}

/// Best lagged correlation of two aligned value vectors over `[-max_lag, max_lag]`.
///
/// Ties go to the smallest `|lag|`, then to the negative lag.
pub fn cross_correlation_values(
    x: &[Option<f64>],
    y: &[Option<f64>],
    max_lag: usize,
    mode: CorrelationMode,
) -> (Option<f64>, i64) {
    if is_constant(x) || is_constant(y) {
        return (None, 0);
    }
    let (cx, gx) = centred(x);
    let (cy, gy) = centred(y);
    let mut best: Option<(f64, i64)> = None;
    for lag in lag_order(max_lag) {
        let Some(r) = lagged_pearson(&cx, &cy, lag, gx || gy) else {
            continue;
        };
        let key = |v: f64| match mode {
            CorrelationMode::Signed => v,
            CorrelationMode::Absolute => v.abs(),
        };
        if best.is_none_or(|(b, _)| key(r) > key(b)) {
            best = Some((r, lag));
        }
    }
    match best {
        Some((v, lag)) => (Some(v), lag),
        None => (None, 0),
    }
}

/// Cross-correlation of two series aligned to the same grid.
pub fn cross_correlation(
    a: (&str, &TimedSeries),
    b: (&str, &TimedSeries),
    max_delay: Millis,
    interval: Millis,
    mode: CorrelationMode,
) -> Result<CrossCorrelationResult> {
    if a.1.timestamps != b.1.timestamps {
        return Err(Error::Report(format!(
            "{} and {} are not aligned to the same grid",
            a.0, b.0
        )));
    }
    if interval <= 0 {
        return Err(Error::Config("grid interval must be positive".into()));
    }
    let max_lag = (max_delay.max(0) / interval) as usize;
    let (best_value, best_lag) =
        cross_correlation_values(&a.1.numeric(), &b.1.numeric(), max_lag, mode);
    Ok(CrossCorrelationResult {
        feature_a: a.0.to_string(),
        feature_b: b.0.to_string(),
        best_value,
        best_lag,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub features: Vec<String>,
    /// Unordered pairs `(i, j)` with `i < j` in feature order.
    pub pairs: Vec<CrossCorrelationResult>,
    /// Lag-zero self-correlation of each feature.
    pub diagonal: Vec<CrossCorrelationResult>,
}

impl CorrelationMatrix {
    /// Entry for an ordered pair. Reversed lookups negate the lag.
    pub fn entry(&self, a: &str, b: &str) -> Option<CrossCorrelationResult> {
        if a == b {
            return self.diagonal.iter().find(|d| d.feature_a == a).cloned();
        }
        self.pairs.iter().find_map(|p| {
            if p.feature_a == a && p.feature_b == b {
                Some(p.clone())
            } else if p.feature_a == b && p.feature_b == a {
                Some(CrossCorrelationResult {
                    feature_a: a.to_string(),
                    feature_b: b.to_string(),
                    best_value: p.best_value,
                    best_lag: -p.best_lag,
                })
            } else {
                None
            }
        })
    }

    pub fn defined_pairs(&self) -> usize {
        self.pairs.iter().filter(|p| p.best_value.is_some()).count()
    }

    pub fn pairs_above(&self, threshold: f64) -> usize {
        self.pairs
            .iter()
            .filter(|p| p.best_value.is_some_and(|v| v > threshold))
            .count()
    }

    /// Share of defined pairs whose best value exceeds `threshold`.
    pub fn high_correlation_fraction(&self, threshold: f64) -> Option<f64> {
        let defined = self.defined_pairs();
        (defined > 0).then(|| self.pairs_above(threshold) as f64 / defined as f64)
    }
}

/// Correlation matrix over named aligned value vectors, in the given order.
/// Pairs are evaluated in parallel; the result does not depend on scheduling.
pub fn correlation_matrix(
    features: &[(String, Vec<Option<f64>>)],
    max_lag: usize,
    mode: CorrelationMode,
) -> CorrelationMatrix {
    let n = features.len();
    let index: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let pairs = index
        .par_iter()
        .map(|&(i, j)| {
            let (best_value, best_lag) =
                cross_correlation_values(&features[i].1, &features[j].1, max_lag, mode);
            CrossCorrelationResult {
                feature_a: features[i].0.clone(),
                feature_b: features[j].0.clone(),
                best_value,
                best_lag,
            }
        })
        .collect();
    let diagonal = features
        .iter()
        .map(|(name, v)| {
            let (best_value, best_lag) = cross_correlation_values(v, v, 0, mode);
            CrossCorrelationResult {
                feature_a: name.clone(),
                feature_b: name.clone(),
                best_value,
                best_lag,
            }
        })
        .collect();
    CorrelationMatrix {
        features: features.iter().map(|f| f.0.clone()).collect(),
        pairs,
        diagonal,
    }
}

/// Missing share of each aligned series.
pub fn recompute_pmv(aligned: &[(String, TimedSeries)]) -> Vec<(String, f64)> {
    aligned
        .iter()
        .map(|(name, s)| {
            let pmv = if s.is_empty() {
                0.0
            } else {
                s.missing_count() as f64 / s.len() as f64
            };
            (name.clone(), pmv)
        })
        .collect()
}
