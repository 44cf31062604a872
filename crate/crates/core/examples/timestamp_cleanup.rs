//! Duplicate timestamps, interval regularity and grid alignment on a small
//! hand-written series.

use sixvs::config::MergePolicy;
use sixvs::timestamp::{
    align_to_grid, build_grid, detect_duplicates, interval_analysis, resolve_duplicates,
};
use sixvs::TimedSeries;

pub fn run() -> sixvs::Result<()> {
    // 10 s data with one repeated reading, one conflicting pair and a late sample.
    let t = vec![0, 10_000, 10_000, 20_000, 30_000, 30_000, 43_000, 50_000, 80_000];
    let v = [1.0, 2.0, 2.0, 3.0, 4.0, 4.6, 5.0, 6.0, 9.0].map(Some);
    let s = TimedSeries::from_numbers(t, &v);

    let dups = detect_duplicates(&s);
    println!("DTS = {}, DTD = {}", dups.dts, dups.dtd);

    let (resolved, log) = resolve_duplicates(&s, MergePolicy::Median);
    for r in &log {
        println!("  t={} rows={} kept {:?}", r.timestamp, r.rows, r.kept);
    }

    let intervals = interval_analysis(&resolved, 10_000, 1_000);
    println!(
        "intervals: {} of {} normal, PTI = {:?}, irregular at {:?}",
        intervals.normal_intervals, intervals.total_intervals, intervals.pti,
        intervals.irregular_positions
    );

    let grid = build_grid(0, 80_000, 10_000)?;
    let (aligned, stats) = align_to_grid(&resolved, &grid, MergePolicy::Median);
    println!(
        "grid of {} slots: {} empty, {} merged",
        grid.slots, stats.empty_slots, stats.merged_slots
    );
    println!("aligned: {:?}", aligned.numeric());
    Ok(())
}

fn main() -> sixvs::Result<()> {
    run()
}
