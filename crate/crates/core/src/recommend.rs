//! Rule-based preprocessing recommendations.
//!
//! Rules live in a versioned data file (`rules/recommendations.json`). Each
//! rule names a data dimension, a severity, a scope (one feature or the whole
//! dataset), a conjunction of indicator comparisons and an action template.
//! Placeholders such as `{nas}` in the template are filled from the indicator
//! values that triggered the rule.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::config::ProfilerConfig;
use crate::error::{Error, Result};
use crate::pipeline::{DatasetProfile, FeatureProfile};

pub const DEFAULT_RULES: &str = include_str!("../rules/recommendations.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimension {
    Volume,
    Variety,
    Velocity,
    Veracity,
    Value,
    Variability,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Info,
    Warn,
    Critical,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Info => "info",
            Severity::Warn => "warn",
            Severity::Critical => "critical",
        })
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dimension::Volume => "volume",
            Dimension::Variety => "variety",
            Dimension::Velocity => "velocity",
            Dimension::Veracity => "veracity",
            Dimension::Value => "value",
            Dimension::Variability => "variability",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    Feature,
    Dataset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Op {
    Gt,
    Ge,
    Lt,
    Le,
    Eq,
    Ne,
}

impl Op {
    fn holds(self, a: f64, b: f64) -> bool {
        match self {
            Op::Gt => a > b,
            Op::Ge => a >= b,
            Op::Lt => a < b,
            Op::Le => a <= b,
            Op::Eq => a == b,
            Op::Ne => a != b,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Op::Gt => ">",
            Op::Ge => ">=",
            Op::Lt => "<",
            Op::Le => "<=",
            Op::Eq => "==",
            Op::Ne => "!=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Condition {
    pub indicator: String,
    pub op: Op,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    /// Compare against another indicator instead of a constant.
    #[serde(default, rename = "ref", skip_serializing_if = "Option::is_none")]
    pub reference: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rule {
    pub id: String,
    pub dimension: Dimension,
    pub severity: Severity,
    pub scope: Scope,
    pub when: Vec<Condition>,
    pub action: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleSet {
    pub version: String,
    pub rules: Vec<Rule>,
}

pub const FEATURE_INDICATORS: &[&str] = &[
    "format_violations",
    "nas",
    "nas_rate",
    "dts",
    "dtd",
    "irregular_intervals",
    "pti",
    "pmv_old",
    "pmv_new",
    "sms",
    "mms",
    "lms",
    "short_medium_spans",
    "seasonal",
    "outliers",
    "outlier_rate",
    "outliers_outside_bounds",
    "bounds_configured",
    "constant",
    "all_missing",
    "strong_partners",
    "invalid_indicators",
];

pub const DATASET_INDICATORS: &[&str] = &[
    "nf",
    "ni",
    "vol",
    "volume_threshold",
    "non_structured_share",
    "sdp",
    "required_interval",
    "pcdf",
    "vc",
    "ver",
    "val",
    "varia",
];

impl RuleSet {
    pub fn parse(text: &str) -> Result<Self> {
        let set: RuleSet = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("recommendation rules: {e}")))?;
        set.validate()?;
        Ok(set)
    }

    pub fn builtin() -> Self {
        Self::parse(DEFAULT_RULES).expect("bundled rule table is valid")
    }

    pub fn rule(&self, id: &str) -> Option<&Rule> {
        self.rules.iter().find(|r| r.id == id)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::BTreeSet::new();
        for rule in &self.rules {
            if !seen.insert(rule.id.as_str()) {
                return Err(Error::Config(format!("duplicate rule id {:?}", rule.id)));
            }
            if rule.when.is_empty() {
                return Err(Error::Config(format!("rule {:?} has no conditions", rule.id)));
            }
            let known = |name: &str| {
                DATASET_INDICATORS.contains(&name)
                    || (rule.scope == Scope::Feature && FEATURE_INDICATORS.contains(&name))
            };
            for c in &rule.when {
                let names = std::iter::once(c.indicator.as_str()).chain(c.reference.as_deref());
                for name in names {
                    if !known(name) {
                        return Err(Error::Config(format!(
                            "rule {:?} uses unknown indicator {name:?}",
                            rule.id
                        )));
                    }
                }
                if c.value.is_some() == c.reference.is_some() {
                    return Err(Error::Config(format!(
                        "rule {:?}: a condition needs exactly one of value and ref",
                        rule.id
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub rule_id: String,
    pub dimension: Dimension,
    pub severity: Severity,
    pub feature: Option<String>,
    /// The triggering condition with the observed values filled in.
    pub trigger: String,
    pub action: String,
    pub evidence: BTreeMap<String, f64>,
}

type Indicators = BTreeMap<&'static str, f64>;

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

pub fn dataset_indicators(profile: &DatasetProfile, config: &ProfilerConfig) -> Indicators {
    let mut m = Indicators::new();
    m.insert("nf", profile.nf as f64);
    m.insert("ni", profile.ni as f64);
    m.insert("vol", profile.scores.vol as f64);
    if let Some(t) = config.volume_threshold {
        m.insert("volume_threshold", t as f64);
    }
    m.insert("non_structured_share", profile.forms.pud + profile.forms.pssd);
    m.insert("sdp", profile.scores.vel);
    if let Some(r) = config.required_interval {
        m.insert("required_interval", r);
    }
    m.insert("pcdf", profile.pcdf);
    let optional = [
        ("vc", profile.scores.components.vc),
        ("ver", profile.scores.ver),
        ("val", profile.scores.val),
        ("varia", profile.scores.varia),
    ];
    for (k, v) in optional {
        if let Some(v) = v {
            m.insert(k, v);
        }
    }
    m
}

pub fn feature_indicators(
    profile: &DatasetProfile,
    feature: &FeatureProfile,
    config: &ProfilerConfig,
) -> Indicators {
    let mut m = Indicators::new();
    let present = feature.stats.present();
    m.insert("format_violations", feature.violations as f64);
    if let Some(spikes) = &feature.spikes {
        m.insert("nas", spikes.nas as f64);
        if present > 0 {
            m.insert("nas_rate", spikes.nas as f64 / present as f64);
        }
    }
    m.insert("dts", feature.duplicates.dts as f64);
    m.insert("dtd", feature.duplicates.dtd as f64);
    m.insert(
        "irregular_intervals",
        (feature.intervals.total_intervals - feature.intervals.normal_intervals) as f64,
    );
    if let Some(pti) = feature.intervals.pti {
        m.insert("pti", pti);
    }
    m.insert("pmv_old", feature.missing_old.pmv);
    m.insert("pmv_new", feature.missing_new.pmv);
    let spans = &feature.missing_new;
    m.insert("sms", spans.sms as f64);
    m.insert("mms", spans.mms as f64);
    m.insert("lms", spans.lms as f64);
    m.insert("short_medium_spans", (spans.sms + spans.mms) as f64);
    m.insert("seasonal", flag(feature.seasonality.seasonal));
    let bounds = config.bounds_for(&feature.name).is_some();
    m.insert("bounds_configured", flag(bounds));
    if let Some(o) = &feature.outliers {
        m.insert("outliers", o.count() as f64);
        m.insert("outlier_rate", o.rate);
        if bounds {
            m.insert("outliers_outside_bounds", o.count() as f64);
        }
    }
    m.insert("constant", flag(present > 0 && feature.stats.is_constant()));
    m.insert("all_missing", flag(present == 0));
    let mut involved = false;
    let mut strong = 0usize;
    for p in &profile.correlation.pairs {
        if p.feature_a != feature.name && p.feature_b != feature.name {
            continue;
        }
        if let Some(v) = p.best_value {
            involved = true;
            if v > config.correlation_threshold {
                strong += 1;
            }
        }
    }
    if involved {
        m.insert("strong_partners", strong as f64);
    }
    m.insert("invalid_indicators", feature.indicators.invalid.len() as f64);
    m
}

fn lookup(name: &str, feature: Option<&Indicators>, dataset: &Indicators) -> Option<f64> {
    feature
        .and_then(|f| f.get(name))
        .or_else(|| dataset.get(name))
        .copied()
}

fn render_number(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else if v.is_finite() {
        let scale = 10f64.powi(5 - v.abs().log10().floor() as i32);
        format!("{}", (v * scale).round() / scale)
    } else {
        format!("{v}")
    }
}

/// Evaluates a rule; on success returns the trigger text and evidence.
fn evaluate(
    rule: &Rule,
    feature: Option<&Indicators>,
    dataset: &Indicators,
) -> Option<(String, BTreeMap<String, f64>)> {
    let mut evidence = BTreeMap::new();
    let mut parts = Vec::new();
    for c in &rule.when {
        let a = lookup(&c.indicator, feature, dataset)?;
        let (b, b_text) = match (&c.reference, c.value) {
            (Some(r), _) => {
                let b = lookup(r, feature, dataset)?;
                evidence.insert(r.clone(), b);
                (b, format!("{r} = {}", render_number(b)))
            }
            (None, Some(v)) => (v, render_number(v)),
            (None, None) => return None,
        };
        if !c.op.holds(a, b) {
            return None;
        }
        evidence.insert(c.indicator.clone(), a);
        parts.push(format!(
            "{} = {} {} {}",
            c.indicator,
            render_number(a),
            c.op.symbol(),
            b_text
        ));
    }
    Some((parts.join(" and "), evidence))
}

fn fill_template(
    template: &str,
    feature: Option<&FeatureProfile>,
    ind: Option<&Indicators>,
    dataset: &Indicators,
) -> String {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let Some(close) = rest[open..].find('}') else {
            out.push_str(&rest[open..]);
            return out;
        };
        let key = &rest[open + 1..open + close];
        let text = match key {
            "feature" => feature.map(|f| f.name.clone()),
            "invalid_factors" => feature.map(|f| f.indicators.invalid.join(", ")),
            _ => lookup(key, ind, dataset).map(render_number),
        };
        match text {
            Some(t) => out.push_str(&t),
            None => out.push_str(&rest[open..=open + close]),
        }
        rest = &rest[open + close + 1..];
    }
    out.push_str(rest);
    out
}

/// Applies `rules` in file order; feature-scoped rules are applied to the
/// features in dataset order.
pub fn recommend_with(
    rules: &RuleSet,
    profile: &DatasetProfile,
    config: &ProfilerConfig,
) -> Vec<Recommendation> {
    let dataset = dataset_indicators(profile, config);
    let per_feature: Vec<Indicators> = profile
        .features
        .iter()
        .map(|f| feature_indicators(profile, f, config))
        .collect();
    let mut out = Vec::new();
    for rule in &rules.rules {
        let targets: Vec<Option<usize>> = match rule.scope {
            Scope::Dataset => vec![None],
            Scope::Feature => (0..profile.features.len()).map(Some).collect(),
        };
        for target in targets {
            let ind = target.map(|i| &per_feature[i]);
            let feature = target.map(|i| &profile.features[i]);
            if let Some((trigger, evidence)) = evaluate(rule, ind, &dataset) {
                out.push(Recommendation {
                    rule_id: rule.id.clone(),
                    dimension: rule.dimension,
                    severity: rule.severity,
                    feature: feature.map(|f| f.name.clone()),
                    trigger,
                    action: fill_template(&rule.action, feature, ind, &dataset),
                    evidence,
                });
            }
        }
    }
    out
}

/// Recommendations from the bundled rule table.
pub fn recommend(profile: &DatasetProfile, config: &ProfilerConfig) -> Vec<Recommendation> {
    recommend_with(&RuleSet::builtin(), profile, config)
}

/// Re-evaluates a recommendation's rule against the stored profile and
/// checks that the recorded evidence matches the profile to within the
/// precision of a machine report.
pub fn trigger_holds(
    rules: &RuleSet,
    profile: &DatasetProfile,
    config: &ProfilerConfig,
    rec: &Recommendation,
) -> bool {
    let Some(rule) = rules.rule(&rec.rule_id) else {
        return false;
    };
    if rule.dimension != rec.dimension || rule.severity != rec.severity {
        return false;
    }
    let dataset = dataset_indicators(profile, config);
    let ind = match (&rec.feature, rule.scope) {
        (Some(name), Scope::Feature) => match profile.feature(name) {
            Some(f) => Some(feature_indicators(profile, f, config)),
            None => return false,
        },
        (None, Scope::Dataset) => None,
        _ => return false,
    };
    match evaluate(rule, ind.as_ref(), &dataset) {
        Some((_, evidence)) => {
            !evidence.is_empty()
                && evidence.len() == rec.evidence.len()
                && evidence.iter().all(|(k, v)| {
                    rec.evidence
                        .get(k)
                        .is_some_and(|r| (r - v).abs() <= 1e-9 * v.abs().max(r.abs()))
                })
        }
        None => false,
    }
}
