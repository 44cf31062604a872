//! Rule-driven recommendations, with each trigger re-checked against the
//! profile. A custom rule file can be passed as the first argument.

use sixvs::recommend::{recommend_with, trigger_holds, RuleSet};
use sixvs::report::emit_machine;
use sixvs::run_pipeline;
use sixvs::ingest::load_dataset;
use sixvs::synth::{generate, SynthSpec};

pub fn run(rules_path: Option<&str>) -> sixvs::Result<()> {
    let rules = match rules_path {
        Some(p) => RuleSet::parse(&std::fs::read_to_string(p).map_err(|e| sixvs::Error::io(p, e))?)?,
        None => RuleSet::builtin(),
    };
    let d = generate(&SynthSpec { rows: 2500, seed: 3, ..SynthSpec::default() })?;
    let ds = load_dataset(&d.name, d.csv.as_bytes(), &d.schema, &d.config)?;
    let p = run_pipeline(&ds, &d.config)?;
    let recs = recommend_with(&rules, &p, &d.config);
    for r in &recs {
        let target = r.feature.as_deref().unwrap_or("dataset");
        let ok = trigger_holds(&rules, &p, &d.config, r);
        println!("[{}] {} {target}: {} ({})", r.severity, r.rule_id, r.trigger, if ok { "holds" } else { "STALE" });
    }
    let json = emit_machine(&p, &recs)?;
    println!("machine report: {} bytes", json.len());
    Ok(())
}

fn main() -> sixvs::Result<()> {
    let arg = std::env::args().nth(1);
    run(arg.as_deref())
}
