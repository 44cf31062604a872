//! Every cargo example runs to completion.

#[allow(dead_code)]
#[path = "../examples/profile_csv.rs"]
mod profile_csv;
#[allow(dead_code)]
#[path = "../examples/timestamp_cleanup.rs"]
mod timestamp_cleanup;
#[allow(dead_code)]
#[path = "../examples/value_statistics.rs"]
mod value_statistics;
#[allow(dead_code)]
#[path = "../examples/seasonality.rs"]
mod seasonality;
#[allow(dead_code)]
#[path = "../examples/cross_correlation.rs"]
mod cross_correlation;
#[allow(dead_code)]
#[path = "../examples/scores.rs"]
mod scores;
#[allow(dead_code)]
#[path = "../examples/synthetic_defects.rs"]
mod synthetic_defects;
#[allow(dead_code)]
#[path = "../examples/recommendations.rs"]
mod recommendations;

#[test]
fn profile_csv_renders_fixture() {
    let text = profile_csv::run(&[]).unwrap();
    assert!(text.contains("Recommendations"));
}

#[test]
fn timestamp_cleanup_runs() {
    timestamp_cleanup::run().unwrap();
}

#[test]
fn value_statistics_runs() {
    value_statistics::run();
}

#[test]
fn seasonality_runs() {
    seasonality::run().unwrap();
}

#[test]
fn cross_correlation_runs() {
    cross_correlation::run().unwrap();
}

#[test]
fn scores_run() {
    scores::run();
}

#[test]
fn synthetic_defects_runs() {
    synthetic_defects::run().unwrap();
}

#[test]
fn recommendations_run() {
    recommendations::run(None).unwrap();
}
