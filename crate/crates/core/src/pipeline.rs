//! The three-stage understanding pipeline.
//!
//! Per feature: duplicates are resolved, interval regularity measured, the
//! raw missing share and spans recorded, distribution factors, spikes and
//! outliers computed on the present values, autocorrelation and seasonality
//! computed on the gap-preserving series, and finally the series is aligned
//! onto the regular grid and its missing share recomputed. The aligned
//! numeric features then feed the cross-correlation matrix, and all stored
//! indicators feed the scores.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{DataForm, FeatureKind, ProfilerConfig, StorageFormat};
use crate::error::{Error, Result};
use crate::features::{correlation_matrix, CorrelationMatrix};
use crate::scoring::{
    score_value, score_variability_with_matrix, score_variety, score_velocity, score_veracity,
    score_volume, ScoreComponents, SixVsScores, VeracityInputs,
};
use crate::series::{Dataset, Feature, Instant};
use crate::timestamp::{
    align_to_grid, build_grid, detect_duplicates, interval_analysis, resolve_duplicates,
    round_to_interval, AlignmentStats, DuplicateReport, IntervalReport, RegularGrid, Resolution,
};
use crate::values::{
    analyze_missing, autocorrelation, categorical_profile, check_formats, classify_forms,
    continuous_profile, detect_outliers, detect_seasonality, detect_spikes, CategoricalProfile,
    ContinuousProfile, FormDistribution, MissingReport, OutlierReport, SeasonalityResult,
    SpikeReport,
};

/// Grids larger than this are rejected as a configuration error.
pub const MAX_GRID_SLOTS: usize = 500_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ValueStats {
    Continuous(ContinuousProfile),
    Categorical(CategoricalProfile),
}

impl ValueStats {
    pub fn std(&self) -> Option<f64> {
        match self {
            ValueStats::Continuous(p) => p.std,
            ValueStats::Categorical(_) => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            ValueStats::Continuous(p) => p.is_constant(),
            ValueStats::Categorical(p) => p.is_constant(),
        }
    }

    pub fn present(&self) -> usize {
        match self {
            ValueStats::Continuous(p) => p.count,
            ValueStats::Categorical(p) => p.count,
        }
    }
}

/// Value indicators attempted for a feature and the ones left undefined.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IndicatorSlots {
    pub attempted: usize,
    pub invalid: Vec<String>,
}

impl IndicatorSlots {
    fn check(&mut self, name: &str, valid: bool) {
        self.attempted += 1;
        if !valid {
            self.invalid.push(name.to_string());
        }
    }
}

/// Value indicator slots: the distribution factors of the feature's kind,
/// its seasonality flag and autocorrelation, plus the seasonal
/// decomposition when candidate periods are configured.
pub fn indicator_slots(
    stats: &ValueStats,
    seasonality: &SeasonalityResult,
    acf: Option<&Vec<f64>>,
    periods_configured: bool,
) -> IndicatorSlots {
    let mut slots = IndicatorSlots::default();
    let present = stats.present() > 0;
    match stats {
        ValueStats::Continuous(p) => {
            for (name, value) in p.factors().into_iter().take(10) {
                slots.check(name, value.is_some());
            }
        }
        ValueStats::Categorical(p) => {
            slots.check("cardinality", p.cardinality.is_some());
            slots.check("mode", p.mode.is_some());
            slots.check("mode_freq", p.mode_freq.is_some());
            slots.check("mode_pct", p.mode_pct.is_some());
        }
    }
    slots.check("seasonality", present);
    slots.check("autocorrelation", acf.is_some());
    if periods_configured {
        slots.check("decomposition", present && !seasonality.low_confidence);
    }
    slots
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureProfile {
    pub name: String,
    pub kind: FeatureKind,
    pub format: StorageFormat,
    pub cdf: bool,
    pub violations: usize,
    pub form: DataForm,
    pub duplicates: DuplicateReport,
    pub intervals: IntervalReport,
    /// Missing share and spans of the de-duplicated raw series.
    pub missing_old: MissingReport,
    /// Missing share and spans after grid alignment.
    pub missing_new: MissingReport,
    pub spikes: Option<SpikeReport>,
    pub stats: ValueStats,
    pub seasonality: SeasonalityResult,
    pub acf: Option<Vec<f64>>,
    pub outliers: Option<OutlierReport>,
    pub alignment: AlignmentStats,
    pub indicators: IndicatorSlots,
}

impl FeatureProfile {
    pub fn nas(&self) -> usize {
        self.spikes.as_ref().map_or(0, |s| s.nas)
    }

    pub fn outlier_rate(&self) -> Option<f64> {
        self.outliers.as_ref().map(|o| o.rate)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoggedResolution {
    pub feature: String,
    #[serde(flatten)]
    pub resolution: Resolution,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PipelineLog {
    pub format_violations: usize,
    pub resolutions: Vec<LoggedResolution>,
    /// Samples dropped during alignment, per feature.
    pub dropped: Vec<(String, usize)>,
    pub degenerate: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetProfile {
    pub dataset: String,
    pub nf: usize,
    pub ni: usize,
    pub rows: usize,
    pub config: ProfilerConfig,
    pub grid: RegularGrid,
    pub pcdf: f64,
    pub forms: FormDistribution,
    pub features: Vec<FeatureProfile>,
    pub correlation: CorrelationMatrix,
    pub scores: SixVsScores,
    pub log: PipelineLog,
}

impl DatasetProfile {
    pub fn feature(&self, name: &str) -> Option<&FeatureProfile> {
        self.features.iter().find(|f| f.name == name)
    }

    /// Recomputes the scores from the stored indicators.
    pub fn rescore(&self) -> SixVsScores {
        compute_scores(
            self.nf,
            self.ni,
            &self.config,
            &self.features,
            &self.forms,
            self.pcdf,
            &self.correlation,
        )
    }

    /// Checks that the stored scores follow from the stored indicators.
    pub fn check_consistency(&self, tolerance: f64) -> Result<()> {
        let fresh = self.rescore();
        let close = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (Some(a), Some(b)) => (a - b).abs() <= tolerance * a.abs().max(b.abs()).max(1e-300) || (a - b).abs() <= tolerance,
            (None, None) => true,
            _ => false,
        };
        let s = &self.scores;
        let varie_ok = match (s.varie, fresh.varie) {
            (crate::scoring::Variety::Infinite, crate::scoring::Variety::Infinite) => true,
            (a, b) => close(Some(a.as_f64()), Some(b.as_f64())),
        };
        let ok = s.vol == fresh.vol
            && varie_ok
            && close(Some(s.vel), Some(fresh.vel))
            && close(s.ver, fresh.ver)
            && close(s.val, fresh.val)
            && close(s.varia, fresh.varia);
        if ok {
            Ok(())
        } else {
            Err(Error::Report(format!(
                "stored scores {s:?} do not match recomputed {fresh:?}"
            )))
        }
    }
}

pub(crate) fn compute_scores(
    nf: usize,
    ni: usize,
    config: &ProfilerConfig,
    features: &[FeatureProfile],
    forms: &FormDistribution,
    pcdf: f64,
    correlation: &CorrelationMatrix,
) -> SixVsScores {
    let vol = u64::try_from(score_volume(nf as u64, ni as u64)).unwrap_or(u64::MAX);
    let n = features.len().max(1) as f64;
    let ptis: Vec<f64> = features.iter().filter_map(|f| f.intervals.pti).collect();
    let veracity = (!ptis.is_empty())
        .then(|| VeracityInputs {
            pcdf,
            mean_nas: features.iter().map(|f| f.nas() as f64).sum::<f64>() / n,
            ni: ni as u64,
            mean_pti: ptis.iter().sum::<f64>() / ptis.len() as f64,
            mean_pmv: features.iter().map(|f| f.missing_old.pmv).sum::<f64>() / n,
        })
        .and_then(|inputs| score_veracity(&inputs, config.veracity_weights));

    let invalid: usize = features.iter().map(|f| f.indicators.invalid.len()).sum();
    let attempted: usize = features.iter().map(|f| f.indicators.attempted).sum();

    let stds: Vec<f64> = features.iter().filter_map(|f| f.stats.std()).collect();
    let rates: Vec<f64> = features.iter().filter_map(FeatureProfile::outlier_rate).collect();
    let variability = score_variability_with_matrix(
        &stds,
        &rates,
        correlation,
        config.correlation_threshold,
        config.variability_weights,
    );

    SixVsScores {
        vol,
        varie: score_variety(forms),
        vel: score_velocity(config.expected_interval),
        ver: veracity.map(|v| v.ver),
        val: score_value(invalid, attempted),
        varia: variability.and_then(|v| v.varia),
        components: ScoreComponents {
            veracity_terms: veracity.map(|v| v.terms),
            nstd: variability.map(|v| v.nstd),
            po: variability.map(|v| v.po),
            vc: variability.and_then(|v| v.vc),
            invalid_indicators: invalid,
            attempted_indicators: attempted,
        },
    }
}

/// Grid spanning the dataset, rounded to the expected interval unless
/// overridden in the configuration.
pub fn dataset_grid(ds: &Dataset, config: &ProfilerConfig) -> Result<RegularGrid> {
    let interval = config.interval_ms();
    let ts = ds
        .features
        .first()
        .map(|f| f.series.timestamps.as_slice())
        .unwrap_or(&[]);
    let (first, last) = match (ts.first(), ts.last()) {
        (Some(a), Some(b)) => (*a, *b),
        _ => return Err(Error::EmptyInput),
    };
    let to_ms = |s: f64| (s * 1000.0).round() as Instant;
    let start = config
        .grid_start
        .map(to_ms)
        .unwrap_or_else(|| round_to_interval(first, interval));
    let end = config
        .grid_end
        .map(to_ms)
        .unwrap_or_else(|| round_to_interval(last, interval));
    let grid = build_grid(start, end, interval)?;
    if grid.slots > MAX_GRID_SLOTS {
        return Err(Error::Config(format!(
            "grid of {} slots exceeds the limit of {MAX_GRID_SLOTS}; check expected_interval",
            grid.slots
        )));
    }
    Ok(grid)
}

struct FeatureRun {
    profile: FeatureProfile,
    resolutions: Vec<Resolution>,
    aligned: Vec<Option<f64>>,
    degenerate: Vec<String>,
}

fn profile_feature(
    feature: &Feature,
    config: &ProfilerConfig,
    grid: &RegularGrid,
    cdf: (bool, usize),
    form: DataForm,
) -> FeatureRun {
    let name = &feature.schema.name;
    let mut degenerate = Vec::new();
    let interval = config.interval_ms();

    // Stage 1: timestamps.
    let duplicates = detect_duplicates(&feature.series);
    let (resolved, resolutions) = resolve_duplicates(&feature.series, config.duplicate_policy);
    let intervals = interval_analysis(&resolved, interval, config.tolerance_ms());
    if intervals.pti.is_none() {
        degenerate.push(format!("{name}: fewer than two samples, PTI undefined"));
    }

    // Stage 2: values.
    let missing_old =
        analyze_missing(&resolved, config.sms_max_ms(), config.mms_max_ms(), interval);
    let continuous = feature.schema.kind == FeatureKind::Continuous;
    let (stats, spikes, outliers, gap_preserving) = if continuous {
        let stats = continuous_profile(&resolved, config.quantile_method);
        let bounds = config.bounds_for(name);
        let spikes = detect_spikes(&resolved, config.spike_k, bounds);
        if spikes.insufficient_data {
            degenerate.push(format!("{name}: too few values for spike detection"));
        }
        let outliers = detect_outliers(
            &resolved,
            config.outlier_coefficient,
            config.quantile_method,
            bounds,
        );
        if outliers.is_none() {
            degenerate.push(format!("{name}: too few values for outlier detection"));
        }
        (
            ValueStats::Continuous(stats),
            Some(spikes),
            outliers,
            resolved.numeric(),
        )
    } else {
        (
            ValueStats::Categorical(categorical_profile(&resolved)),
            None,
            None,
            resolved.coded(),
        )
    };
    if stats.present() == 0 {
        degenerate.push(format!("{name}: every value is missing"));
    } else if stats.is_constant() {
        degenerate.push(format!("{name}: constant feature"));
    }
    let acf = autocorrelation(&gap_preserving, config.max_acf_lag);
    let seasonality = detect_seasonality(
        &gap_preserving,
        &config.seasonal_periods,
        config.seasonal_tolerance,
    );
    if !config.seasonal_periods.is_empty() && seasonality.low_confidence {
        degenerate.push(format!("{name}: no candidate period could be decomposed"));
    }

    // Stage 3 input: alignment.
    let (aligned, alignment) = align_to_grid(&resolved, grid, config.grid_policy);
    let missing_new =
        analyze_missing(&aligned, config.sms_max_ms(), config.mms_max_ms(), interval);
    let aligned_values = if continuous { aligned.numeric() } else { Vec::new() };

    let indicators = indicator_slots(
        &stats,
        &seasonality,
        acf.as_ref(),
        !config.seasonal_periods.is_empty(),
    );
    FeatureRun {
        profile: FeatureProfile {
            name: name.clone(),
            kind: feature.schema.kind,
            format: feature.schema.expected_format,
            cdf: cdf.0,
            violations: cdf.1,
            form,
            duplicates,
            intervals,
            missing_old,
            missing_new,
            spikes,
            stats,
            seasonality,
            acf,
            outliers,
            alignment,
            indicators,
        },
        resolutions,
        aligned: aligned_values,
        degenerate,
    }
}

/// Runs the full pipeline. Per-feature conditions such as constant or empty
/// features are recorded in the log and never abort the run.
pub fn run_pipeline(ds: &Dataset, config: &ProfilerConfig) -> Result<DatasetProfile> {
    config.validate()?;
    let grid = dataset_grid(ds, config)?;
    let formats = check_formats(ds);
    let forms = classify_forms(ds);

    let runs: Vec<FeatureRun> = ds
        .features
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            let fmt = &formats.features[i];
            profile_feature(f, config, &grid, (fmt.cdf, fmt.violations), forms.features[i].form)
        })
        .collect();

    let mut log = PipelineLog {
        format_violations: ds.violations.len(),
        ..PipelineLog::default()
    };
    let mut features = Vec::with_capacity(runs.len());
    let mut numeric = Vec::new();
    for run in runs {
        let name = run.profile.name.clone();
        log.resolutions.extend(run.resolutions.into_iter().map(|r| LoggedResolution {
            feature: name.clone(),
            resolution: r,
        }));
        if run.profile.alignment.dropped > 0 {
            log.dropped.push((name.clone(), run.profile.alignment.dropped));
        }
        log.degenerate.extend(run.degenerate);
        if run.profile.kind == FeatureKind::Continuous {
            numeric.push((name, run.aligned));
        }
        features.push(run.profile);
    }

    let correlation = correlation_matrix(&numeric, config.max_cross_lag(), config.correlation_mode);
    drop(numeric);
    let scores = compute_scores(
        ds.nf(),
        ds.ni,
        config,
        &features,
        &forms.distribution,
        formats.pcdf,
        &correlation,
    );
    Ok(DatasetProfile {
        dataset: ds.name.clone(),
        nf: ds.nf(),
        ni: ds.ni,
        rows: ds.rows(),
        config: config.clone(),
        grid,
        pcdf: formats.pcdf,
        forms: forms.distribution,
        features,
        correlation,
        scores,
        log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::values::{CategoricalProfile, ContinuousProfile};

    #[test]
    fn constant_feature_loses_three_slots() {
        let constant = ContinuousProfile {
            count: 5,
            cardinality: Some(1),
            min: Some(0.0),
            q1: Some(0.0),
            mean: Some(0.0),
            median: Some(0.0),
            q3: Some(0.0),
            max: Some(0.0),
            std: Some(0.0),
            skewness: None,
            excess_kurtosis: None,
        };
        let flag = SeasonalityResult::default();
        let slots = indicator_slots(&ValueStats::Continuous(constant), &flag, None, true);
        assert_eq!(slots.attempted, 13);
        assert_eq!(slots.invalid, vec!["skewness", "excess_kurtosis", "autocorrelation"]);

        // Nine healthy continuous features plus the constant one.
        let healthy = ContinuousProfile {
            skewness: Some(0.1),
            excess_kurtosis: Some(-1.0),
            std: Some(1.0),
            ..ContinuousProfile::default()
        };
        let mut total = (3usize, 13usize);
        for _ in 0..9 {
            let mut p = healthy.clone();
            p.count = 5;
            p.cardinality = Some(5);
            for v in [&mut p.min, &mut p.q1, &mut p.mean, &mut p.median, &mut p.q3, &mut p.max] {
                *v = Some(1.0);
            }
            let s = indicator_slots(&ValueStats::Continuous(p), &flag, Some(&vec![1.0]), true);
            total.0 += s.invalid.len();
            total.1 += s.attempted;
        }
        assert_eq!(total, (3, 130));
        assert_eq!(score_value(total.0, total.1), Some(3.0 / 130.0));
    }

    #[test]
    fn categorical_slots() {
        let p = CategoricalProfile {
            count: 3,
            cardinality: Some(2),
            mode: Some("a".into()),
            mode_freq: Some(2),
            mode_pct: Some(2.0 / 3.0),
        };
        let s = indicator_slots(&ValueStats::Categorical(p), &SeasonalityResult::default(), Some(&vec![1.0]), false);
        assert_eq!(s.attempted, 6);
        assert!(s.invalid.is_empty());
        let empty = indicator_slots(
            &ValueStats::Categorical(CategoricalProfile::default()),
            &SeasonalityResult { low_confidence: true, ..Default::default() },
            None,
            true,
        );
        assert_eq!(empty.attempted, 7);
        assert_eq!(empty.invalid.len(), 7);
    }
}
