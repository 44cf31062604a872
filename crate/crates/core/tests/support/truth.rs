//! Comparison of pipeline output with generator ground truth.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sixvs::ingest::load_dataset;
use sixvs::pipeline::{run_pipeline, DatasetProfile};
use sixvs::synth::{SynthDataset, SynthSpec};

pub fn profile_of(d: &SynthDataset) -> DatasetProfile {
    let ds = load_dataset(&d.name, d.csv.as_bytes(), &d.schema, &d.config).unwrap();
    run_pipeline(&ds, &d.config).unwrap()
}

macro_rules! expect_eq {
    ($what:expr, $got:expr, $want:expr) => {
        if $got != $want {
            return Err(format!("{}: got {:?}, expected {:?}", $what, $got, $want));
        }
    };
}

/// Checks every injected count; returns the first mismatch.
pub fn check_recovery(d: &SynthDataset, p: &DatasetProfile) -> Result<(), String> {
    let t = &d.truth;
    expect_eq!("nf", p.nf, t.nf);
    expect_eq!("ni", p.ni, t.ni);
    expect_eq!("rows", p.rows, t.csv_rows);
    expect_eq!("grid slots", p.grid.slots, t.grid_slots);
    for (fp, ft) in p.features.iter().zip(&t.features) {
        let name = &ft.name;
        expect_eq!(format!("{name} dts"), fp.duplicates.dts, ft.dts);
        expect_eq!(format!("{name} dtd"), fp.duplicates.dtd, ft.dtd);
        let irregular = fp.intervals.total_intervals - fp.intervals.normal_intervals;
        expect_eq!(format!("{name} irregular intervals"), irregular, t.irregular_intervals);
        let old = &fp.missing_old;
        expect_eq!(format!("{name} spans old"), [old.sms, old.mms, old.lms], ft.spans_old);
        let new = &fp.missing_new;
        expect_eq!(format!("{name} spans new"), [new.sms, new.mms, new.lms], ft.spans_new);
        expect_eq!(format!("{name} pmv old"), old.pmv, ft.pmv_old);
        expect_eq!(format!("{name} pmv new"), new.pmv, ft.pmv_new);
        if let Some(o) = &fp.outliers {
            expect_eq!(format!("{name} outliers"), o.count(), ft.outliers);
        }
    }
    Ok(())
}

/// A random generator configuration; every one fits its row budget.
pub fn random_spec(rng: &mut ChaCha8Rng) -> SynthSpec {
    let features = rng.random_range(1..=4);
    SynthSpec {
        rows: rng.random_range(3000..=8000),
        interval: [0.5, 1.0, 10.0, 60.0][rng.random_range(0..4)],
        features,
        categorical: rng.random_bool(0.4),
        dts_groups: rng.random_range(0..=4),
        dtd_groups: rng.random_range(0..=3),
        gaps: [
            rng.random_range(0..=3),
            rng.random_range(0..=2),
            rng.random_range(0..=2),
        ],
        outliers: rng.random_range(0..=8),
        jitters: rng.random_range(0..=4),
        drops: rng.random_range(0..=4),
        start: rng.random_range(1_500_000_000_000..1_800_000_000_000),
        seed: rng.random(),
    }
}

pub fn spec_stream(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
