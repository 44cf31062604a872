//! Descriptive statistics, outliers, spikes and missing-value spans for one
//! feature.

use sixvs::config::QuantileMethod;
use sixvs::values::{analyze_missing, continuous_profile, detect_outliers, detect_spikes};
use sixvs::TimedSeries;

pub fn run() {
    let mut v: Vec<Option<f64>> = (0..60).map(|i| Some(20.0 + (i as f64 * 0.3).sin())).collect();
    v[17] = Some(95.0);
    v[30] = None;
    for slot in &mut v[40..48] {
        *slot = None;
    }
    let s = TimedSeries::from_numbers((0..60).map(|i| i * 1000).collect(), &v);

    let p = continuous_profile(&s, QuantileMethod::Linear);
    println!(
        "n={} min={:?} median={:?} max={:?} std={:?} skew={:?} kurt={:?}",
        p.count, p.min, p.median, p.max, p.std, p.skewness, p.excess_kurtosis
    );

    if let Some(o) = detect_outliers(&s, 1.5, QuantileMethod::Linear, None) {
        println!("fences [{:.3}, {:.3}]: outliers at {:?}", o.lower, o.upper, o.indices);
    }

    let spikes = detect_spikes(&s, 3.0, Some((0.0, 50.0)));
    println!("NAS = {}", spikes.nas);

    let m = analyze_missing(&s, 5_000, 30_000, 1_000);
    println!("missing {} of {} (PMV {:.4}): SMS {} MMS {} LMS {}", m.missing, m.values, m.pmv, m.sms, m.mms, m.lms);
}

fn main() {
    run()
}
