//! Classical moving-average seasonal decomposition and the seasonality flag
//! derived from it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::values::stats::{mean, population_std};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecompositionModel {
    Additive,
    Multiplicative,
}

/// Components aligned to the input. `None` marks positions outside the
/// decomposed run or where the centred trend is not defined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionResult {
    pub model: DecompositionModel,
    pub period: usize,
    /// Input positions `[start, end)` of the decomposed run.
    pub start: usize,
    pub end: usize,
    pub trend: Vec<Option<f64>>,
    pub seasonal: Vec<Option<f64>>,
    pub residual: Vec<Option<f64>>,
}

/// Longest run of consecutive present values, as `[start, end)`.
fn longest_present_run(values: &[Option<f64>]) -> (usize, usize) {
    let (mut best, mut cur_start) = ((0, 0), 0);
    for (i, v) in values.iter().enumerate() {
        if v.is_none() {
            cur_start = i + 1;
        } else if i + 1 - cur_start > best.1 - best.0 {
            best = (cur_start, i + 1);
        }
    }
    best
}

/// Centred moving average of width `period`; even periods use the 2×period
/// average with half weights at both ends.
fn centred_trend(x: &[f64], period: usize) -> Vec<Option<f64>> {
    let n = x.len();
    let half = period / 2;
    let centre = mean(x).unwrap_or(0.0);
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for v in x {
        acc += v - centre;
        prefix.push(acc);
    }
    let p = period as f64;
    (0..n)
        .map(|t| {
            if t < half || t + half >= n {
                return None;
            }
            let sum = if period % 2 == 1 {
                prefix[t + half + 1] - prefix[t - half]
            } else {
                prefix[t + half] - prefix[t - half + 1]
                    + 0.5 * ((x[t - half] - centre) + (x[t + half] - centre))
            };
            Some(centre + sum / p)
        })
        .collect()
}

/// Decomposes the longest gap-free run of `values`.
///
/// The seasonal index of a sample is its input position modulo `period`.
pub fn decompose(
    values: &[Option<f64>],
    period: usize,
    model: DecompositionModel,
) -> Result<DecompositionResult> {
    if period < 2 {
        return Err(Error::Config(format!("seasonal period must be at least 2, got {period}")));
    }
    let (start, end) = longest_present_run(values);
    if end - start < 2 * period {
        return Err(Error::Report(format!(
            "decomposition unavailable: need {} contiguous values for period {period}, longest run is {}",
            2 * period,
            end - start
        )));
    }
    let x: Vec<f64> = values[start..end].iter().map(|v| v.unwrap()).collect();
    let trend = centred_trend(&x, period);

    let mut phase_sum = vec![0.0; period];
    let mut phase_n = vec![0usize; period];
    for (i, (v, t)) in x.iter().zip(&trend).enumerate() {
        let Some(t) = t else { continue };
        let d = match model {
            DecompositionModel::Additive => v - t,
            DecompositionModel::Multiplicative if *t != 0.0 => v / t,
            DecompositionModel::Multiplicative => continue,
        };
        let phase = (start + i) % period;
        phase_sum[phase] += d;
        phase_n[phase] += 1;
    }
    let mut index: Vec<f64> = phase_sum
        .iter()
        .zip(&phase_n)
        .map(|(s, n)| if *n > 0 { s / *n as f64 } else { f64::NAN })
        .collect();
    let defined: Vec<f64> = index.iter().copied().filter(|v| v.is_finite()).collect();
    let level = mean(&defined).unwrap_or(0.0);
    for v in &mut index {
        match model {
            DecompositionModel::Additive => *v -= level,
            DecompositionModel::Multiplicative => *v /= level,
        }
    }

    let n = values.len();
    let mut out_trend = vec![None; n];
    let mut out_seasonal = vec![None; n];
    let mut out_residual = vec![None; n];
    for (i, v) in x.iter().enumerate() {
        let pos = start + i;
        let s = index[pos % period];
        if !s.is_finite() {
            continue;
        }
        out_seasonal[pos] = Some(s);
        if let Some(t) = trend[i] {
            out_trend[pos] = Some(t);
            out_residual[pos] = match model {
                DecompositionModel::Additive => Some(v - t - s),
                DecompositionModel::Multiplicative if t != 0.0 && s != 0.0 => Some(v / (t * s)),
                DecompositionModel::Multiplicative => None,
            };
        }
    }
    Ok(DecompositionResult {
        model,
        period,
        start,
        end,
        trend: out_trend,
        seasonal: out_seasonal,
        residual: out_residual,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SeasonalityResult {
    pub seasonal: bool,
    /// Period whose seasonal component crossed the threshold.
    pub period: Option<usize>,
    /// Largest seasonal range divided by the series std.
    pub amplitude_ratio: Option<f64>,
    /// No candidate period could be decomposed.
    pub low_confidence: bool,
}

/// Flags a series as seasonal when, for some candidate period, the range of
/// its additive seasonal component exceeds `tolerance` times the series std.
/// A flat seasonal line means no seasonality.
pub fn detect_seasonality(
    values: &[Option<f64>],
    periods: &[usize],
    tolerance: f64,
) -> SeasonalityResult {
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    let std = population_std(&present).unwrap_or(0.0);
    let mut result = SeasonalityResult {
        low_confidence: true,
        ..SeasonalityResult::default()
    };
    for &period in periods {
        let Ok(d) = decompose(values, period, DecompositionModel::Additive) else {
            continue;
        };
        result.low_confidence = false;
        if std == 0.0 {
            continue;
        }
        let (lo, hi) = d
            .seasonal
            .iter()
            .flatten()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
        let ratio = (hi - lo) / std;
        if result.amplitude_ratio.is_none_or(|r| ratio > r) {
            result.amplitude_ratio = Some(ratio);
        }
        if ratio > tolerance && !result.seasonal {
            result.seasonal = true;
            result.period = Some(period);
        }
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn some(v: &[f64]) -> Vec<Option<f64>> {
        v.iter().copied().map(Some).collect()
    }

    #[test]
    fn constant_series_has_flat_components() {
        let d = decompose(&some(&[7.0; 60]), 12, DecompositionModel::Additive).unwrap();
        assert!(d.seasonal.iter().flatten().all(|s| s.abs() < 1e-12));
        assert!(d.residual.iter().flatten().all(|r| r.abs() < 1e-12));
        assert!(!detect_seasonality(&some(&[7.0; 60]), &[12], 0.05).seasonal);
    }

    #[test]
    fn sine_amplitude_recovered() {
        let x: Vec<f64> = (0..24 * 20).map(|t| 5.0 + (2.0 * PI * t as f64 / 24.0).sin()).collect();
        let d = decompose(&some(&x), 24, DecompositionModel::Additive).unwrap();
        let s: Vec<f64> = d.seasonal.iter().flatten().copied().collect();
        let amp = (s.iter().cloned().fold(f64::MIN, f64::max) - s.iter().cloned().fold(f64::MAX, f64::min)) / 2.0;
        assert!((amp - 1.0).abs() < 0.05, "amplitude {amp}");
        assert!(d.residual.iter().flatten().all(|r| r.abs() < 1e-6));
        let flag = detect_seasonality(&some(&x), &[24], 0.05);
        assert!(flag.seasonal);
        // range 2 over std 1/sqrt(2)
        assert!((flag.amplitude_ratio.unwrap() - 2.0 * 2f64.sqrt()).abs() < 0.05);
    }

    #[test]
    fn linear_trend_has_no_seasonal_part() {
        let x: Vec<f64> = (0..120).map(|t| t as f64).collect();
        let d = decompose(&some(&x), 12, DecompositionModel::Additive).unwrap();
        assert!(d.seasonal.iter().flatten().all(|s| s.abs() < 1e-9));
        assert!(d.trend[6..114].iter().zip(&x[6..114]).all(|(t, x)| (t.unwrap() - x).abs() < 1e-9));
        assert!(d.trend[..6].iter().all(Option::is_none));
    }

    #[test]
    fn odd_period_trend_window() {
        let x = [1.0, 2.0, 6.0, 4.0, 5.0, 9.0, 7.0];
        let d = decompose(&some(&x), 3, DecompositionModel::Additive).unwrap();
        assert_eq!(d.trend[0], None);
        assert!((d.trend[1].unwrap() - 3.0).abs() < 1e-12);
        assert!((d.trend[2].unwrap() - 4.0).abs() < 1e-12);
        assert_eq!(d.trend[6], None);
    }

    #[test]
    fn multiplicative_reconstruction() {
        let x: Vec<f64> = (0..96)
            .map(|t| (10.0 + 0.1 * t as f64) * (1.0 + 0.2 * (2.0 * PI * t as f64 / 12.0).cos()))
            .collect();
        let d = decompose(&some(&x), 12, DecompositionModel::Multiplicative).unwrap();
        for (i, xv) in x.iter().enumerate() {
            if let (Some(t), Some(s), Some(r)) = (d.trend[i], d.seasonal[i], d.residual[i]) {
                assert!((t * s * r - xv).abs() <= 1e-9 * xv.abs().max(1.0));
            }
        }
        let s: Vec<f64> = d.seasonal.iter().flatten().copied().collect();
        let mean = s.iter().sum::<f64>() / s.len() as f64;
        assert!((mean - 1.0).abs() < 0.01);
    }

    #[test]
    fn uses_longest_gap_free_run() {
        let mut v = some(&(0..100).map(|t| (t % 4) as f64).collect::<Vec<_>>());
        v[10] = None;
        let d = decompose(&v, 4, DecompositionModel::Additive).unwrap();
        assert_eq!((d.start, d.end), (11, 100));
        assert!(d.seasonal[5].is_none());
        assert!(d.seasonal[11].is_some());
    }

    #[test]
    fn insufficient_length() {
        assert!(decompose(&some(&[1.0; 23]), 12, DecompositionModel::Additive).is_err());
        assert!(decompose(&some(&[1.0; 30]), 1, DecompositionModel::Additive).is_err());
        let r = detect_seasonality(&some(&[1.0, 2.0, 3.0]), &[12], 0.05);
        assert!(!r.seasonal);
        assert!(r.low_confidence);
    }
}
