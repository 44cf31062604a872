//! Distribution factors of continuous and categorical features.
//!
//! All factors are computed over non-missing values only. Dispersion uses
//! population (biased) central moments; kurtosis is reported as excess
//! kurtosis.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::config::QuantileMethod;
use crate::series::{Cell, TimedSeries};

/// Quantile `p` of an ascending slice under `method`.
pub fn quantile_sorted(sorted: &[f64], p: f64, method: QuantileMethod) -> Option<f64> {
    if sorted.is_empty() || !(0.0..=1.0).contains(&p) {
        return None;
    }
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    let (a, b) = (sorted[lo], sorted[hi]);
    Some(match method {
        QuantileMethod::Linear => a + (h - lo as f64) * (b - a),
        QuantileMethod::Lower => a,
        QuantileMethod::Higher => b,
        QuantileMethod::Nearest => sorted[h.round() as usize],
        QuantileMethod::Midpoint => (a + b) / 2.0,
    })
}

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

pub(crate) fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| compensated_sum(values.iter().copied()) / values.len() as f64)
}

/// Population standard deviation.
pub(crate) fn population_std(values: &[f64]) -> Option<f64> {
    let m = mean(values)?;
    let m2 = compensated_sum(values.iter().map(|v| (v - m) * (v - m))) / values.len() as f64;
    Some(m2.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub std: f64,
    pub skewness: Option<f64>,
    pub excess_kurtosis: Option<f64>,
}

/// Mean, population std, skewness `m3 / m2^1.5` and excess kurtosis
/// `m4 / m2^2 - 3`. Shape factors are `None` for constant samples.
pub fn moments(values: &[f64]) -> Option<Moments> {
    let n = values.len() as f64;
    let mean = mean(values)?;
    let constant = values.iter().all(|v| *v == values[0]);
    if constant {
        return Some(Moments {
            mean: values[0],
            std: 0.0,
            skewness: None,
            excess_kurtosis: None,
        });
    }
    // Moments about the rounded mean, shifted onto the exact mean.
    let r = compensated_sum(values.iter().map(|v| v - mean)) / n;
    let s2 = compensated_sum(values.iter().map(|v| (v - mean).powi(2))) / n;
    let s3 = compensated_sum(values.iter().map(|v| (v - mean).powi(3))) / n;
    let s4 = compensated_sum(values.iter().map(|v| (v - mean).powi(4))) / n;
    let m2 = s2 - r * r;
    let m3 = s3 - 3.0 * r * s2 + 2.0 * r.powi(3);
    let m4 = s4 - 4.0 * r * s3 + 6.0 * r * r * s2 - 3.0 * r.powi(4);
    Some(Moments {
        mean: mean + r,
        std: m2.sqrt(),
        skewness: Some(m3 / m2.powf(1.5)),
        excess_kurtosis: Some(m4 / (m2 * m2) - 3.0),
    })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ContinuousProfile {
    /// Number of non-missing values.
    pub count: usize,
    pub cardinality: Option<usize>,
    pub min: Option<f64>,
    pub q1: Option<f64>,
    pub mean: Option<f64>,
    pub median: Option<f64>,
    pub q3: Option<f64>,
    pub max: Option<f64>,
    pub std: Option<f64>,
    pub skewness: Option<f64>,
    pub excess_kurtosis: Option<f64>,
}

impl ContinuousProfile {
    pub fn is_constant(&self) -> bool {
        self.std == Some(0.0)
    }

    /// Names and values of the distribution factors, in report order.
    pub fn factors(&self) -> [(&'static str, Option<f64>); 11] {
        [
            ("cardinality", self.cardinality.map(|c| c as f64)),
            ("min", self.min),
            ("q1", self.q1),
            ("mean", self.mean),
            ("median", self.median),
            ("q3", self.q3),
            ("max", self.max),
            ("std", self.std),
            ("skewness", self.skewness),
            ("excess_kurtosis", self.excess_kurtosis),
            ("count", Some(self.count as f64)),
        ]
    }
}

pub fn continuous_profile(s: &TimedSeries, method: QuantileMethod) -> ContinuousProfile {
    let mut values = s.present_numbers();
    profile_of_values(&mut values, method)
}

pub(crate) fn profile_of_values(values: &mut [f64], method: QuantileMethod) -> ContinuousProfile {
    let Some(m) = moments(values) else {
        return ContinuousProfile::default();
    };
    values.sort_by(f64::total_cmp);
    let cardinality = 1 + values.windows(2).filter(|w| w[0] != w[1]).count();
    let q = |p| quantile_sorted(values, p, method);
    ContinuousProfile {
        count: values.len(),
        cardinality: Some(cardinality),
        min: values.first().copied(),
        q1: q(0.25),
        mean: Some(m.mean),
        median: q(0.5),
        q3: q(0.75),
        max: values.last().copied(),
        std: Some(m.std),
        skewness: m.skewness,
        excess_kurtosis: m.excess_kurtosis,
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CategoricalProfile {
    pub count: usize,
    pub cardinality: Option<usize>,
    pub mode: Option<String>,
    pub mode_freq: Option<usize>,
    pub mode_pct: Option<f64>,
}

impl CategoricalProfile {
    pub fn is_constant(&self) -> bool {
        self.cardinality == Some(1)
    }
}

/// Mode, its frequency and share. Ties go to the token seen first.
pub fn categorical_profile(s: &TimedSeries) -> CategoricalProfile {
    let mut counts: HashMap<String, (usize, usize)> = HashMap::new();
    let mut count = 0;
    for (i, cell) in s.values.iter().enumerate() {
        let token = match cell {
            Cell::Cat(t) => t.clone(),
            Cell::Num(v) => v.to_string(),
            Cell::Missing => continue,
        };
        count += 1;
        counts.entry(token).or_insert((0, i)).0 += 1;
    }
    let Some((mode, (freq, _))) = counts
        .iter()
        .max_by(|a, b| a.1 .0.cmp(&b.1 .0).then(b.1 .1.cmp(&a.1 .1)))
    else {
        return CategoricalProfile::default();
    };
    CategoricalProfile {
        count,
        cardinality: Some(counts.len()),
        mode: Some(mode.clone()),
        mode_freq: Some(*freq),
        mode_pct: Some(*freq as f64 / count as f64),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::TimedSeries;
    use proptest::prelude::*;

    fn cats(tokens: &[&str]) -> TimedSeries {
        TimedSeries::new(
            (0..tokens.len() as i64).collect(),
            tokens
                .iter()
                .map(|t| if t.is_empty() { Cell::Missing } else { Cell::Cat(t.to_string()) })
                .collect(),
        )
    }

    #[test]
    fn constant_series() {
        let p = continuous_profile(&TimedSeries::regular(1, &[2.0, 2.0, 2.0]), QuantileMethod::Linear);
        assert_eq!(p.mean, Some(2.0));
        assert_eq!(p.std, Some(0.0));
        assert_eq!(p.skewness, None);
        assert_eq!(p.excess_kurtosis, None);
        assert_eq!(p.cardinality, Some(1));
    }

    #[test]
    fn one_to_five() {
        // (n - 1) p = 1, 2, 3 land exactly on order statistics.
        let p = continuous_profile(
            &TimedSeries::regular(1, &[5.0, 1.0, 4.0, 2.0, 3.0]),
            QuantileMethod::Linear,
        );
        assert_eq!(p.median, Some(3.0));
        assert_eq!(p.q1, Some(2.0));
        assert_eq!(p.q3, Some(4.0));
        assert!(p.skewness.unwrap().abs() < 1e-12);
        // m2 = 2, m4 = 6.8 -> 6.8 / 4 - 3
        assert!((p.excess_kurtosis.unwrap() - (-1.3)).abs() < 1e-12);
        assert!((p.std.unwrap() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn all_missing_is_undefined() {
        let s = TimedSeries::from_numbers(vec![0, 1], &[None, None]);
        let p = continuous_profile(&s, QuantileMethod::Linear);
        assert_eq!(p, ContinuousProfile::default());
    }

    #[test]
    fn quantile_methods() {
        let v = [1.0, 2.0, 3.0, 4.0];
        // h = 0.75 for p = 0.25
        assert_eq!(quantile_sorted(&v, 0.25, QuantileMethod::Linear), Some(1.75));
        assert_eq!(quantile_sorted(&v, 0.25, QuantileMethod::Lower), Some(1.0));
        assert_eq!(quantile_sorted(&v, 0.25, QuantileMethod::Higher), Some(2.0));
        assert_eq!(quantile_sorted(&v, 0.25, QuantileMethod::Nearest), Some(2.0));
        assert_eq!(quantile_sorted(&v, 0.25, QuantileMethod::Midpoint), Some(1.5));
        assert_eq!(quantile_sorted(&[], 0.5, QuantileMethod::Linear), None);
    }

    #[test]
    fn categorical_mode() {
        let p = categorical_profile(&cats(&["a", "a", "b"]));
        assert_eq!(p.mode.as_deref(), Some("a"));
        assert_eq!(p.mode_freq, Some(2));
        assert_eq!(p.mode_pct, Some(2.0 / 3.0));
        let p = categorical_profile(&cats(&["a", "b"]));
        assert_eq!(p.mode.as_deref(), Some("a"));
        assert_eq!(p.mode_pct, Some(0.5));
        let p = categorical_profile(&cats(&["b", "", "a", "a", "b"]));
        assert_eq!(p.mode.as_deref(), Some("b"));
        assert_eq!(p.mode_pct, Some(0.5));
        assert_eq!(categorical_profile(&cats(&["", ""])), CategoricalProfile::default());
    }

    #[test]
    fn categorical_counting_matches_brute_force() {
        use rand::{seq::SliceRandom, SeedableRng};
        let mut tokens: Vec<&str> = Vec::new();
        tokens.extend(std::iter::repeat_n("on", 400));
        tokens.extend(std::iter::repeat_n("off", 350));
        tokens.extend(std::iter::repeat_n("idle", 250));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        tokens.shuffle(&mut rng);
        let p = categorical_profile(&cats(&tokens));
        let brute = tokens.iter().filter(|t| **t == "on").count();
        assert_eq!(brute, 400);
        assert_eq!(p.mode.as_deref(), Some("on"));
        assert_eq!(p.mode_freq, Some(brute));
        assert_eq!(p.mode_pct, Some(0.4));
        assert_eq!(p.cardinality, Some(3));
    }

    proptest! {
        #[test]
        fn quantiles_are_ordered(mut v in prop::collection::vec(-1e6f64..1e6, 1..200)) {
            let p = profile_of_values(&mut v, QuantileMethod::Linear);
            let (min, q1, med, q3, max) = (p.min.unwrap(), p.q1.unwrap(), p.median.unwrap(), p.q3.unwrap(), p.max.unwrap());
            prop_assert!(min <= q1 && q1 <= med && med <= q3 && q3 <= max);
            prop_assert!(p.std.unwrap() >= 0.0);
            prop_assert_eq!(p.skewness.is_none(), p.std == Some(0.0));
        }

        #[test]
        fn symmetric_sample_has_zero_skew(half in prop::collection::vec(0.01f64..1e3, 1..100), centre in -1e3f64..1e3) {
            let mut v: Vec<f64> = half.iter().map(|d| centre + d).collect();
            v.extend(half.iter().map(|d| centre - d));
            let m = moments(&v).unwrap();
            let scale = half.iter().cloned().fold(0.0, f64::max);
            prop_assert!(m.skewness.unwrap().abs() <= 1e-9 * (1.0 + centre.abs() / scale));
        }
    }
}
