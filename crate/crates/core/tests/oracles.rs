mod support;

use support::oracles::{acf_suite, moments_suite, outlier_suite, quantile_suite, CASES, SEED};
use support::truth::{check_recovery, profile_of, random_spec, spec_stream};

#[test]
fn quantiles_match_order_statistics() {
    assert_eq!(quantile_suite(SEED, CASES), Ok(CASES));
}

#[test]
fn moments_match_direct_formulas() {
    assert_eq!(moments_suite(SEED + 1, CASES), Ok(CASES));
}

#[test]
fn outliers_match_exhaustive_scan() {
    assert_eq!(outlier_suite(SEED + 2, CASES), Ok(CASES));
}

#[test]
fn autocorrelation_matches_definition() {
    assert_eq!(acf_suite(SEED + 3, CASES), Ok(CASES));
}

#[test]
fn random_generator_configs_are_recovered() {
    let mut rng = spec_stream(99);
    for _ in 0..10 {
        let spec = random_spec(&mut rng);
        let d = sixvs::synth::generate(&spec).unwrap();
        let p = profile_of(&d);
        if let Err(e) = check_recovery(&d, &p) {
            panic!("{e}\n{spec:?}");
        }
    }
}
