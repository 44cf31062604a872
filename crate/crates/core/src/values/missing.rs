//! Missing-value share and missing spans.

use serde::{Deserialize, Serialize};

use crate::series::{Instant, Millis, TimedSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SpanClass {
    Sms,
    Mms,
    Lms,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissingSpan {
    pub start: Instant,
    pub end: Instant,
    /// Number of consecutive missing samples.
    pub length: usize,
    pub class: SpanClass,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MissingReport {
    pub values: usize,
    pub missing: usize,
    pub pmv: f64,
    pub spans: Vec<MissingSpan>,
    pub sms: usize,
    pub mms: usize,
    pub lms: usize,
}

pub fn classify_span(duration: Millis, sms_max: Millis, mms_max: Millis) -> SpanClass {
    if duration <= sms_max {
        SpanClass::Sms
    } else if duration <= mms_max {
        SpanClass::Mms
    } else {
        SpanClass::Lms
    }
}

/// Share of missing cells and the maximal runs of missing cells. A run of
/// `n` samples lasts `n * interval`.
pub fn analyze_missing(
    s: &TimedSeries,
    sms_max: Millis,
    mms_max: Millis,
    interval: Millis,
) -> MissingReport {
    let mut report = MissingReport {
        values: s.len(),
        ..MissingReport::default()
    };
    let mut i = 0;
    while i < s.len() {
        if !s.values[i].is_missing() {
            i += 1;
            continue;
        }
        let start = i;
        while i < s.len() && s.values[i].is_missing() {
            i += 1;
        }
        let length = i - start;
        let class = classify_span(length as i64 * interval, sms_max, mms_max);
        match class {
            SpanClass::Sms => report.sms += 1,
            SpanClass::Mms => report.mms += 1,
            SpanClass::Lms => report.lms += 1,
        }
        report.missing += length;
        report.spans.push(MissingSpan {
            start: s.timestamps[start],
            end: s.timestamps[i - 1],
            length,
            class,
        });
    }
    report.pmv = if s.is_empty() {
        0.0
    } else {
        report.missing as f64 / s.len() as f64
    };
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Cell;

    const MIN: Millis = 60_000;

    #[test]
    fn half_missing() {
        let s = TimedSeries::from_numbers(vec![0, 1, 2, 3], &[Some(1.0), None, Some(3.0), None]);
        let r = analyze_missing(&s, 30 * MIN, 360 * MIN, 1);
        assert_eq!(r.pmv, 0.5);
        assert_eq!(r.spans.len(), 2);
    }

    #[test]
    fn twelve_minute_gap_is_short() {
        // 72 samples at 10 s = 12 minutes.
        let mut v = vec![Some(1.0); 100];
        v[10..82].iter_mut().for_each(|x| *x = None);
        let s = TimedSeries::from_numbers((0..100).map(|i| i * 10_000).collect(), &v);
        let r = analyze_missing(&s, 30 * MIN, 360 * MIN, 10_000);
        assert_eq!((r.sms, r.mms, r.lms), (1, 0, 0));
        assert_eq!(r.spans[0].length, 72);
        assert_eq!(r.spans[0].start, 100_000);
        assert_eq!(r.spans[0].end, 810_000);
    }

    #[test]
    fn span_classes() {
        assert_eq!(classify_span(30 * MIN, 30 * MIN, 360 * MIN), SpanClass::Sms);
        assert_eq!(classify_span(30 * MIN + 1, 30 * MIN, 360 * MIN), SpanClass::Mms);
        assert_eq!(classify_span(360 * MIN, 30 * MIN, 360 * MIN), SpanClass::Mms);
        assert_eq!(classify_span(360 * MIN + 1, 30 * MIN, 360 * MIN), SpanClass::Lms);
    }

    #[test]
    fn no_missing() {
        let s = TimedSeries::regular(1, &[1.0, 2.0]);
        let r = analyze_missing(&s, 1, 2, 1);
        assert_eq!(r.pmv, 0.0);
        assert!(r.spans.is_empty());
        let s = TimedSeries::new(vec![0], vec![Cell::Missing]);
        assert_eq!(analyze_missing(&s, 1, 2, 1).pmv, 1.0);
    }
}
