//! Machine (JSON) and human (table) reports.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::DataForm;
use crate::error::{Error, Result};
use crate::pipeline::{DatasetProfile, FeatureProfile, ValueStats};
use crate::recommend::{Recommendation, RuleSet};
use crate::scoring::{SixVsScores, Variety};

pub const REPORT_FORMAT: &str = "sixvs-profile";
pub const REPORT_VERSION: u32 = 1;
pub const SIGNIFICANT_DIGITS: usize = 12;
/// Tolerance used when checking stored scores against recomputed ones.
pub const CONSISTENCY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Machine,
    Human,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "machine" => Ok(ReportFormat::Machine),
            "human" => Ok(ReportFormat::Human),
            other => Err(Error::Config(format!("unknown report format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MachineReport {
    pub format: String,
    pub version: u32,
    pub rules_version: String,
    pub profile: DatasetProfile,
    pub recommendations: Vec<Recommendation>,
}

/// Rounds to `SIGNIFICANT_DIGITS` significant digits.
pub fn round_significant(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                if let Some(r) = serde_json::Number::from_f64(round_significant(x)) {
                    *n = r;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Machine report: sorted keys, floats at 12 significant digits, infinite
/// variety as `"+inf"`.
pub fn emit_machine(profile: &DatasetProfile, recs: &[Recommendation]) -> Result<String> {
    let report = MachineReport {
        format: REPORT_FORMAT.to_string(),
        version: REPORT_VERSION,
        rules_version: RuleSet::builtin().version,
        profile: profile.clone(),
        recommendations: recs.to_vec(),
    };
    let mut value = serde_json::to_value(&report)?;
    round_floats(&mut value);
    let mut text = serde_json::to_string_pretty(&value)?;
    text.push('\n');
    Ok(text)
}

/// Parses a machine report and checks that its scores follow from its
/// indicators.
pub fn parse_machine_report(text: &str) -> Result<MachineReport> {
    let report: MachineReport = serde_json::from_str(text)?;
    if report.format != REPORT_FORMAT {
        return Err(Error::Report(format!("unexpected format {:?}", report.format)));
    }
    if report.version != REPORT_VERSION {
        return Err(Error::Report(format!("unsupported version {}", report.version)));
    }
    report.profile.check_consistency(CONSISTENCY_TOLERANCE)?;
    Ok(report)
}

pub fn emit_report(
    profile: &DatasetProfile,
    recs: &[Recommendation],
    format: ReportFormat,
) -> Result<String> {
    match format {
        ReportFormat::Machine => emit_machine(profile, recs),
        ReportFormat::Human => Ok(emit_human(profile, recs)),
    }
}

pub fn write_report(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// One-line score summary.
pub fn summary_line(profile: &DatasetProfile) -> String {
    let s = &profile.scores;
    format!(
        "{}: Vol={} Varie={} Vel={}s Ver={} Val={} Varia={}",
        profile.dataset,
        s.vol,
        s.varie,
        trim_number(s.vel, 6),
        opt(s.ver, |v| format!("{v:.4e}")),
        opt(s.val, |v| format!("{v:.4}")),
        opt(s.varia, |v| format!("{v:.4}")),
    )
}

fn opt(v: Option<f64>, f: impl Fn(f64) -> String) -> String {
    v.map_or_else(|| "N/A".to_string(), f)
}

fn trim_number(v: f64, decimals: usize) -> String {
    let s = format!("{v:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn percent(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{}%", trim_number(v * 100.0, 3))
    }
}

fn thousands(n: u64) -> String {
    let digits = n.to_string();
    let mut out = String::new();
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(ch);
    }
    out
}

fn scientific(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let s = format!("{v:.3e}");
    match s.split_once('e') {
        Some((m, e)) => format!("{}e{e}", trim_number(m.parse().unwrap_or(0.0), 3)),
        None => s,
    }
}

fn variety_text(v: Variety) -> String {
    match v {
        Variety::Infinite => "+inf".to_string(),
        Variety::Finite(x) => trim_number(x, 4),
    }
}

fn form_text(form: DataForm) -> &'static str {
    match form {
        DataForm::Structured => "100%/0/0",
        DataForm::Unstructured => "0/100%/0",
        DataForm::SemiStructured => "0/0/100%",
    }
}

struct Table {
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new() -> Self {
        Table { rows: Vec::new() }
    }

    fn row<I, S>(&mut self, cells: I)
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.rows.push(cells.into_iter().map(Into::into).collect());
    }

    fn render(&self, out: &mut String) {
        let cols = self.rows.iter().map(Vec::len).max().unwrap_or(0);
        let widths: Vec<usize> = (0..cols)
            .map(|c| {
                self.rows
                    .iter()
                    .filter_map(|r| r.get(c))
                    .map(|s| s.chars().count())
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        for row in &self.rows {
            let mut line = String::new();
            for (c, cell) in row.iter().enumerate() {
                if c > 0 {
                    line.push_str("  ");
                }
                let _ = write!(line, "{cell:<width$}", width = widths[c]);
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
    }
}

fn scores_table(s: &SixVsScores, out: &mut String) {
    let mut t = Table::new();
    t.row(["6Vs", "Volume", "Variety", "Velocity", "Veracity", "Value", "Variability"]);
    t.row(["Evaluation metrics", "Vol", "Varie", "Vel", "Ver", "Val", "Varia"]);
    t.row([
        "Scores".to_string(),
        thousands(s.vol),
        variety_text(s.varie),
        format!("{}s", trim_number(s.vel, 3)),
        opt(s.ver, scientific),
        opt(s.val, |v| trim_number(v, 4)),
        opt(s.varia, |v| trim_number(v, 4)),
    ]);
    t.render(out);
}

fn per_feature<F>(t: &mut Table, dim: &str, label: &str, p: &DatasetProfile, f: F)
where
    F: Fn(&FeatureProfile) -> String,
{
    let mut header = vec![dim.to_string(), label.to_string()];
    header.extend(p.features.iter().map(|f| f.name.clone()));
    t.row(header);
    let mut values = vec![String::new(), String::new()];
    values.extend(p.features.iter().map(f));
    t.row(values);
}

fn indicator_table(p: &DatasetProfile, out: &mut String) {
    let mut t = Table::new();
    t.row([
        "Volume".to_string(),
        "NF".to_string(),
        p.nf.to_string(),
        "NI".to_string(),
        thousands(p.ni as u64),
    ]);
    per_feature(&mut t, "Variety", "PSD/PUD/PSSD", p, |f| form_text(f.form).to_string());
    t.row([
        "Velocity".to_string(),
        "SDP".to_string(),
        format!("{}s", trim_number(p.scores.vel, 3)),
    ]);
    per_feature(&mut t, "Veracity", "CDF", p, |f| {
        if f.cdf { "Yes" } else { "No" }.to_string()
    });
    t.row([String::new(), "PCDF".to_string(), percent(p.pcdf)]);
    per_feature(&mut t, "", "NAS", p, |f| {
        f.spikes.as_ref().map_or("N/A".to_string(), |s| s.nas.to_string())
    });
    per_feature(&mut t, "", "PTI", p, |f| opt(f.intervals.pti, percent));
    per_feature(&mut t, "", "DTS/DTD", p, |f| {
        format!("{}/{}", f.duplicates.dts, f.duplicates.dtd)
    });
    per_feature(&mut t, "", "PMV old", p, |f| percent(f.missing_old.pmv));
    let mut new = vec![String::new(), "PMV new".to_string()];
    new.extend(p.features.iter().map(|f| percent(f.missing_new.pmv)));
    t.row(new);
    per_feature(&mut t, "", "SMS/MMS/LMS", p, |f| {
        let m = &f.missing_new;
        format!("{}/{}/{}", m.sms, m.mms, m.lms)
    });
    t.row(["Value", "Statistical metrics", "See statistical values"]);
    t.row([
        "Variability",
        "std",
        "See statistical values",
        "cross correlation",
        "See cross correlation",
    ]);
    per_feature(&mut t, "", "outlier rate", p, |f| {
        f.outliers.as_ref().map_or("N/A".to_string(), |o| percent(o.rate))
    });
    t.render(out);
}

fn stats_table(p: &DatasetProfile, out: &mut String) {
    let mut t = Table::new();
    let mut header = vec![String::new()];
    header.extend(p.features.iter().map(|f| f.name.clone()));
    t.row(header);
    let num = |v: Option<f64>| opt(v, |x| trim_number(x, 2));
    type Getter = fn(&FeatureProfile) -> Option<String>;
    let continuous: [(&str, fn(&crate::values::ContinuousProfile) -> Option<f64>); 9] = [
        ("min", |c| c.min),
        ("max", |c| c.max),
        ("mean", |c| c.mean),
        ("median", |c| c.median),
        ("std", |c| c.std),
        ("skewness", |c| c.skewness),
        ("excess kurtosis", |c| c.excess_kurtosis),
        ("1st qrt", |c| c.q1),
        ("3rd qrt", |c| c.q3),
    ];
    let card: Getter = |f| match &f.stats {
        ValueStats::Continuous(c) => c.cardinality.map(|v| v.to_string()),
        ValueStats::Categorical(c) => c.cardinality.map(|v| v.to_string()),
    };
    let mut row = vec!["cardinality".to_string()];
    row.extend(p.features.iter().map(|f| card(f).unwrap_or_else(|| "N/A".into())));
    t.row(row);
    for (label, get) in continuous {
        let mut row = vec![label.to_string()];
        row.extend(p.features.iter().map(|f| match &f.stats {
            ValueStats::Continuous(c) => num(get(c)),
            ValueStats::Categorical(_) => "-".to_string(),
        }));
        t.row(row);
    }
    if p.features.iter().any(|f| matches!(f.stats, ValueStats::Categorical(_))) {
        let cat: [(&str, Getter); 3] = [
            ("mode", |f| match &f.stats {
                ValueStats::Categorical(c) => c.mode.clone(),
                _ => Some("-".into()),
            }),
            ("mode freq", |f| match &f.stats {
                ValueStats::Categorical(c) => c.mode_freq.map(|v| v.to_string()),
                _ => Some("-".into()),
            }),
            ("mode pct", |f| match &f.stats {
                ValueStats::Categorical(c) => c.mode_pct.map(percent),
                _ => Some("-".into()),
            }),
        ];
        for (label, get) in cat {
            let mut row = vec![label.to_string()];
            row.extend(p.features.iter().map(|f| get(f).unwrap_or_else(|| "N/A".into())));
            t.row(row);
        }
    }
    let mut row = vec!["seasonality".to_string()];
    row.extend(p.features.iter().map(|f| {
        if f.seasonality.seasonal { "Yes" } else { "No" }.to_string()
    }));
    t.row(row);
    let mut row = vec!["autocorrelation lag 1".to_string()];
    row.extend(
        p.features
            .iter()
            .map(|f| num(f.acf.as_ref().and_then(|a| a.get(1).copied()))),
    );
    t.row(row);
    t.render(out);
}

fn correlation_table(p: &DatasetProfile, out: &mut String) {
    let names = &p.correlation.features;
    if names.is_empty() {
        out.push_str("no continuous features\n");
        return;
    }
    let mut t = Table::new();
    let mut header = vec![String::new()];
    header.extend(names.iter().cloned());
    t.row(header);
    for a in names {
        let mut row = vec![a.clone()];
        row.extend(names.iter().map(|b| {
            p.correlation
                .entry(a, b)
                .and_then(|r| r.best_value)
                .map_or("N/A".to_string(), |v| format!("{v:.2}"))
        }));
        t.row(row);
    }
    t.render(out);
}

/// Human report in table layout: scores header, indicator table,
/// statistical values, cross-correlation maxima and recommendations.
pub fn emit_human(profile: &DatasetProfile, recs: &[Recommendation]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Dataset: {}", profile.dataset);
    out.push('\n');
    out.push_str("Evaluation scores\n");
    scores_table(&profile.scores, &mut out);
    out.push('\n');
    out.push_str("Indicators\n");
    indicator_table(profile, &mut out);
    out.push('\n');
    out.push_str("Statistical values\n");
    stats_table(profile, &mut out);
    out.push('\n');
    let _ = writeln!(
        out,
        "Cross correlation (largest value within {} s)",
        trim_number(profile.config.max_cross_delay, 3)
    );
    correlation_table(profile, &mut out);
    out.push('\n');
    out.push_str("Recommendations\n");
    if recs.is_empty() {
        out.push_str("none\n");
    }
    for r in recs {
        let target = r.feature.as_deref().unwrap_or("dataset");
        let _ = writeln!(
            out,
            "[{}] {} / {}: {}\n    because {}",
            r.severity, r.dimension, target, r.action, r.trigger
        );
    }
    if !profile.log.degenerate.is_empty() {
        out.push('\n');
        out.push_str("Notes\n");
        for note in &profile.log.degenerate {
            let _ = writeln!(out, "- {note}");
        }
    }
    out
}
