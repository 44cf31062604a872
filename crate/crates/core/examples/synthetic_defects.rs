//! Generate a dataset with known defects and compare the profile with the
//! injected counts.

use sixvs::ingest::load_dataset;
use sixvs::run_pipeline;
use sixvs::synth::{generate, SynthSpec};

pub fn run() -> sixvs::Result<()> {
    let spec = SynthSpec { rows: 3000, features: 2, seed: 11, ..SynthSpec::default() };
    let d = generate(&spec)?;
    let ds = load_dataset(&d.name, d.csv.as_bytes(), &d.schema, &d.config)?;
    let p = run_pipeline(&ds, &d.config)?;

    println!("ni: profiled {} injected {}", p.ni, d.truth.ni);
    for (f, t) in p.features.iter().zip(&d.truth.features) {
        let m = &f.missing_old;
        println!(
            "{}: DTS {}/{} DTD {}/{} spans {:?}/{:?} outliers {:?}/{}",
            f.name,
            f.duplicates.dts, t.dts,
            f.duplicates.dtd, t.dtd,
            [m.sms, m.mms, m.lms], t.spans_old,
            f.outliers.as_ref().map(|o| o.count()), t.outliers
        );
    }
    Ok(())
}

fn main() -> sixvs::Result<()> {
    run()
}
