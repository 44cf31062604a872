//! Profile a CSV file and print the human report.
//!
//! ```text
//! cargo run --example profile_csv -- data.csv schema.json config.json
//! ```
//! Without arguments the bundled plant fixture is used.

use std::path::{Path, PathBuf};

use sixvs::config::{load_config, load_schema};
use sixvs::ingest::load_dataset_path;
use sixvs::recommend::recommend;
use sixvs::report::{emit_human, summary_line};
use sixvs::run_pipeline;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn run(args: &[String]) -> sixvs::Result<String> {
    let (input, schema, config) = match args {
        [i, s, c, ..] => (PathBuf::from(i), PathBuf::from(s), PathBuf::from(c)),
        _ => (fixture("plant.csv"), fixture("plant_schema.json"), fixture("plant_config.json")),
    };
    let schema = load_schema(&schema)?;
    let config = load_config(&config)?;
    let dataset = load_dataset_path(&input, &schema, &config)?;
    let profile = run_pipeline(&dataset, &config)?;
    let recs = recommend(&profile, &config);
    println!("{}", summary_line(&profile));
    Ok(emit_human(&profile, &recs))
}

fn main() -> sixvs::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    print!("{}", run(&args)?);
    Ok(())
}
