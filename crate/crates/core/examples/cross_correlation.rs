//! Largest lagged cross-correlation between two aligned signals.

use sixvs::config::CorrelationMode;
use sixvs::features::cross_correlation;
use sixvs::TimedSeries;

pub fn run() -> sixvs::Result<()> {
    let n = 500;
    let a: Vec<f64> = (0..n).map(|i| ((i * 37 % 101) as f64).sin()).collect();
    // b follows a with a 3 sample delay.
    let b: Vec<f64> = (0..n).map(|i| if i >= 3 { a[i - 3] } else { 0.0 }).collect();
    let sa = TimedSeries::regular(1000, &a);
    let sb = TimedSeries::regular(1000, &b);

    let r = cross_correlation(("a", &sa), ("b", &sb), 10_000, 1000, CorrelationMode::Signed)?;
    println!("best r = {:.4} at lag {}", r.best_value.unwrap_or(f64::NAN), r.best_lag);

    let neg: Vec<f64> = a.iter().map(|v| -v).collect();
    let sn = TimedSeries::regular(1000, &neg);
    for mode in [CorrelationMode::Signed, CorrelationMode::Absolute] {
        let r = cross_correlation(("a", &sa), ("-a", &sn), 5_000, 1000, mode)?;
        println!("{mode:?}: {:.4} at lag {}", r.best_value.unwrap_or(f64::NAN), r.best_lag);
    }
    Ok(())
}

fn main() -> sixvs::Result<()> {
    run()
}
