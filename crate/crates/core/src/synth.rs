//! Synthetic sensor datasets with injected defects and recorded ground truth.
//!
//! A dataset starts as a perfect grid of `rows` slots. Defects are placed at
//! non-overlapping random positions (with a two-slot margin) so that each one
//! has a single, predictable effect on the indicators:
//!
//! * exact duplicate rows (DTS groups in every feature),
//! * duplicate rows with one perturbed feature (DTD there, DTS elsewhere),
//! * runs of missing cells of short, medium and long duration per feature,
//! * IQR outliers at +/-100 against a base signal bounded by 1,
//! * jittered rows shifted by 0.3 intervals (two irregular intervals each),
//! * dropped rows (one irregular interval and one empty grid slot each).

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{FeatureSchema, ProfilerConfig};
use crate::error::{Error, Result};
use crate::ingest::render_timestamp;
use crate::series::{Instant, Millis};

/// Run lengths, in slots, for each span class. The generated configuration
/// puts the class limits at 5 and 30 intervals.
pub const SMS_LENGTHS: (usize, usize) = (1, 5);
pub const MMS_LENGTHS: (usize, usize) = (6, 30);
pub const LMS_LENGTHS: (usize, usize) = (31, 60);
pub const OUTLIER_MAGNITUDE: f64 = 100.0;
const MARGIN: usize = 2;
const CATEGORIES: [&str; 3] = ["low", "mid", "high"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSpec {
    pub rows: usize,
    /// Seconds.
    pub interval: f64,
    pub features: usize,
    pub categorical: bool,
    pub dts_groups: usize,
    pub dtd_groups: usize,
    /// Gaps per feature: short, medium, long.
    pub gaps: [usize; 3],
    /// Outliers per continuous feature.
    pub outliers: usize,
    pub jitters: usize,
    pub drops: usize,
    /// Epoch milliseconds of the first slot, rounded down to the interval.
    pub start: Instant,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            rows: 2000,
            interval: 1.0,
            features: 3,
            categorical: false,
            dts_groups: 3,
            dtd_groups: 1,
            gaps: [2, 1, 1],
            outliers: 5,
            jitters: 2,
            drops: 2,
            start: 1_700_000_000_000,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FeatureTruth {
    pub name: String,
    pub dts: usize,
    pub dtd: usize,
    /// Span counts on the de-duplicated raw series.
    pub spans_old: [usize; 3],
    /// Span counts after grid alignment.
    pub spans_new: [usize; 3],
    pub missing_old: usize,
    pub pmv_old: f64,
    pub missing_new: usize,
    pub pmv_new: f64,
    pub outliers: usize,
    /// Grid slots of the injected outliers.
    pub outlier_slots: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub nf: usize,
    /// Distinct timestamps.
    pub ni: usize,
    /// Data rows in the CSV, duplicates included.
    pub csv_rows: usize,
    pub grid_slots: usize,
    pub irregular_intervals: usize,
    pub features: Vec<FeatureTruth>,
}

#[derive(Debug, Clone)]
pub struct SynthDataset {
    pub name: String,
    pub csv: String,
    pub schema: Vec<FeatureSchema>,
    pub config: ProfilerConfig,
    pub truth: GroundTruth,
}

/// Reserves non-overlapping slot ranges.
struct Allocator {
    taken: Vec<bool>,
}

impl Allocator {
    fn new(slots: usize) -> Self {
        let mut taken = vec![false; slots];
        let edge = (MARGIN + 1).min(slots);
        taken[..edge].iter_mut().for_each(|t| *t = true);
        taken[slots - edge..].iter_mut().for_each(|t| *t = true);
        Allocator { taken }
    }

    fn reserve(&mut self, rng: &mut ChaCha8Rng, len: usize) -> Result<usize> {
        let n = self.taken.len();
        if len + 2 * MARGIN >= n {
            return Err(Error::Config(format!("a defect of {len} slots does not fit")));
        }
        for _ in 0..10_000 {
            let start = rng.random_range(MARGIN..n - len - MARGIN);
            let lo = start - MARGIN;
            let hi = start + len + MARGIN;
            if self.taken[lo..hi].iter().all(|t| !t) {
                self.taken[lo..hi].iter_mut().for_each(|t| *t = true);
                return Ok(start);
            }
        }
        Err(Error::Config(
            "too many defects for the number of rows; increase rows".to_string(),
        ))
    }
}

fn class_index(len: usize) -> usize {
    if len <= SMS_LENGTHS.1 {
        0
    } else if len <= MMS_LENGTHS.1 {
        1
    } else {
        2
    }
}

fn round4(v: f64) -> f64 {
    (v * 1e4).round() / 1e4
}

enum Duplicate {
    Exact { copies: usize },
    Perturbed { feature: usize },
}

/// Generates the dataset, its schema, a matching configuration and the
/// ground truth the pipeline is expected to report.
pub fn generate(spec: &SynthSpec) -> Result<SynthDataset> {
    if spec.rows < 16 || spec.features == 0 {
        return Err(Error::Config("need at least 16 rows and one feature".into()));
    }
    if !(spec.interval > 0.0 && spec.interval.is_finite()) {
        return Err(Error::Config("interval must be positive".into()));
    }
    let mut config = ProfilerConfig::with_interval(spec.interval);
    config.sms_max = SMS_LENGTHS.1 as f64 * spec.interval;
    config.mms_max = MMS_LENGTHS.1 as f64 * spec.interval;
    config.seed = spec.seed;
    let step: Millis = config.interval_ms();
    let t0 = spec.start.div_euclid(step) * step;

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.rows;
    let nc = spec.features;
    let total = nc + usize::from(spec.categorical);
    let mut names: Vec<String> = (0..nc).map(|i| format!("s{}", i + 1)).collect();
    if spec.categorical {
        names.push("mode".to_string());
    }

    // Base signal, rounded so the CSV text parses back to the same value.
    let mut values: Vec<Vec<Option<f64>>> = (0..nc)
        .map(|f| {
            let period = 50.0 + 7.0 * f as f64;
            (0..n)
                .map(|i| {
                    let phase = 2.0 * std::f64::consts::PI * i as f64 / period;
                    Some(round4(0.8 * phase.sin() + rng.random_range(-0.2..0.2)))
                })
                .collect()
        })
        .collect();
    let mut tokens: Vec<Option<usize>> = (0..n)
        .map(|i| {
            let x = (2.0 * std::f64::consts::PI * i as f64 / 80.0).sin();
            Some(if x < -0.33 { 0 } else if x < 0.33 { 1 } else { 2 })
        })
        .collect();

    let mut alloc = Allocator::new(n);
    let mut truth = GroundTruth {
        nf: total,
        features: names
            .iter()
            .map(|name| FeatureTruth {
                name: name.clone(),
                ..FeatureTruth::default()
            })
            .collect(),
        ..GroundTruth::default()
    };

    let mut dropped = vec![false; n];
    for _ in 0..spec.drops {
        let slot = alloc.reserve(&mut rng, 1)?;
        dropped[slot] = true;
    }
    let mut offset = vec![0 as Millis; n];
    for _ in 0..spec.jitters {
        let slot = alloc.reserve(&mut rng, 1)?;
        offset[slot] = (3 * step) / 10;
    }
    let mut duplicates: Vec<Option<Duplicate>> = (0..n).map(|_| None).collect();
    for _ in 0..spec.dts_groups {
        let slot = alloc.reserve(&mut rng, 1)?;
        let copies = rng.random_range(1..=2);
        duplicates[slot] = Some(Duplicate::Exact { copies });
        truth.features.iter_mut().for_each(|f| f.dts += 1);
    }
    for _ in 0..spec.dtd_groups {
        let slot = alloc.reserve(&mut rng, 1)?;
        let feature = rng.random_range(0..total);
        duplicates[slot] = Some(Duplicate::Perturbed { feature });
        for (i, f) in truth.features.iter_mut().enumerate() {
            if i == feature {
                f.dtd += 1;
            } else {
                f.dts += 1;
            }
        }
    }

    for f in 0..total {
        for (class, count) in spec.gaps.iter().enumerate() {
            let (lo, hi) = [SMS_LENGTHS, MMS_LENGTHS, LMS_LENGTHS][class];
            for _ in 0..*count {
                let len = rng.random_range(lo..=hi);
                let start = alloc.reserve(&mut rng, len)?;
                for slot in start..start + len {
                    if f < nc {
                        values[f][slot] = None;
                    } else {
                        tokens[slot] = None;
                    }
                }
                let t = &mut truth.features[f];
                t.spans_old[class_index(len)] += 1;
                t.spans_new[class_index(len)] += 1;
                t.missing_old += len;
                t.missing_new += len;
            }
        }
    }
    for f in 0..nc {
        for _ in 0..spec.outliers {
            let slot = alloc.reserve(&mut rng, 1)?;
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            values[f][slot] = Some(sign * OUTLIER_MAGNITUDE);
            truth.features[f].outlier_slots.push(slot);
        }
        truth.features[f].outlier_slots.sort_unstable();
        truth.features[f].outliers = spec.outliers;
    }

    // Rows.
    let mut csv = String::with_capacity(n * (16 + 8 * total));
    csv.push_str("timestamp");
    for name in &names {
        csv.push(',');
        csv.push_str(name);
    }
    csv.push('\n');
    let mut csv_rows = 0;
    let mut write_row = |csv: &mut String, slot: usize, bump: Option<usize>| {
        csv.push_str(&render_timestamp(t0 + slot as Millis * step + offset[slot]));
        for f in 0..total {
            csv.push(',');
            let perturbed = bump == Some(f);
            if f < nc {
                if let Some(v) = values[f][slot] {
                    let v = if perturbed { round4(v + 0.05) } else { v };
                    let _ = write!(csv, "{v}");
                }
            } else if let Some(k) = tokens[slot] {
                let k = if perturbed { (k + 1) % CATEGORIES.len() } else { k };
                csv.push_str(CATEGORIES[k]);
            }
        }
        csv.push('\n');
        csv_rows += 1;
    };
    for slot in 0..n {
        if dropped[slot] {
            continue;
        }
        write_row(&mut csv, slot, None);
        match duplicates[slot] {
            Some(Duplicate::Exact { copies }) => {
                for _ in 0..copies {
                    write_row(&mut csv, slot, None);
                }
            }
            Some(Duplicate::Perturbed { feature }) => write_row(&mut csv, slot, Some(feature)),
            None => {}
        }
    }

    truth.csv_rows = csv_rows;
    truth.ni = n - spec.drops;
    truth.grid_slots = n;
    truth.irregular_intervals = 2 * spec.jitters + spec.drops;
    for t in &mut truth.features {
        t.spans_new[0] += spec.drops;
        t.missing_new += spec.drops;
        t.pmv_old = t.missing_old as f64 / truth.ni as f64;
        t.pmv_new = t.missing_new as f64 / n as f64;
    }

    let mut schema: Vec<FeatureSchema> =
        names[..nc].iter().map(FeatureSchema::continuous).collect();
    if spec.categorical {
        schema.push(FeatureSchema::categorical(&names[nc]));
    }
    Ok(SynthDataset {
        name: format!("synthetic-{}", spec.seed),
        csv,
        schema,
        config,
        truth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        let spec = SynthSpec::default();
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a.csv, b.csv);
        assert_eq!(a.truth, b.truth);
        let c = generate(&SynthSpec { seed: 8, ..spec }).unwrap();
        assert_ne!(a.csv, c.csv);
    }

    #[test]
    fn row_accounting() {
        let spec = SynthSpec::default();
        let d = generate(&spec).unwrap();
        let lines = d.csv.lines().count() - 1;
        assert_eq!(lines, d.truth.csv_rows);
        assert!(lines >= spec.rows - spec.drops + spec.dts_groups + spec.dtd_groups);
        assert_eq!(d.truth.ni, spec.rows - spec.drops);
        assert_eq!(d.truth.features[0].spans_old, [2, 1, 1]);
        assert_eq!(d.truth.features[0].spans_new, [4, 1, 1]);
    }

    #[test]
    fn crowded_spec_is_rejected() {
        let spec = SynthSpec { rows: 40, gaps: [0, 0, 5], ..SynthSpec::default() };
        assert!(generate(&spec).is_err());
    }
}
