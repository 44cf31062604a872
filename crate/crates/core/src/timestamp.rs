//! Timestamp understanding: duplicate detection and resolution, interval
//! regularity, and alignment onto a regular grid.

use serde::{Deserialize, Serialize};

use crate::config::MergePolicy;
use crate::error::{Error, Result};
use crate::series::{Cell, Instant, Millis, TimedSeries};

/// Rows sharing one timestamp.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DuplicateGroup {
    pub timestamp: Instant,
    /// Positions within the series.
    pub rows: Vec<usize>,
    pub same_value: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DuplicateReport {
    /// Groups whose non-missing values all agree.
    pub dts: usize,
    /// Groups with disagreeing values.
    pub dtd: usize,
    pub groups: Vec<DuplicateGroup>,
}

/// Groups equal timestamps of a sorted series.
pub fn detect_duplicates(s: &TimedSeries) -> DuplicateReport {
    let mut report = DuplicateReport::default();
    let mut i = 0;
    let n = s.len();
    while i < n {
        let mut j = i + 1;
        while j < n && s.timestamps[j] == s.timestamps[i] {
            j += 1;
        }
        if j - i >= 2 {
            let mut present = s.values[i..j].iter().filter(|c| !c.is_missing());
            let same_value = match present.next() {
                Some(first) => present.all(|c| c.same_value(first)),
                None => true,
            };
            if same_value {
                report.dts += 1;
            } else {
                report.dtd += 1;
            }
            report.groups.push(DuplicateGroup {
                timestamp: s.timestamps[i],
                rows: (i..j).collect(),
                same_value,
            });
        }
        i = j;
    }
    report
}

/// One collapsed duplicate group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Resolution {
    pub timestamp: Instant,
    pub rows: usize,
    pub same_value: bool,
    pub kept: Cell,
}

/// Merges the cells that land on one timestamp. Missing cells are ignored;
/// categorical tokens always resolve to the first present token.
pub fn merge_cells(cells: &[&Cell], policy: MergePolicy) -> Cell {
    let present: Vec<&Cell> = cells.iter().copied().filter(|c| !c.is_missing()).collect();
    let Some(first) = present.first() else {
        return Cell::Missing;
    };
    if present.iter().all(|c| c.same_value(first)) {
        return (*first).clone();
    }
    let mut nums: Vec<f64> = present.iter().filter_map(|c| c.as_f64()).collect();
    if nums.len() != present.len() || policy == MergePolicy::First {
        return (*first).clone();
    }
    match policy {
        MergePolicy::First => unreachable!(),
        MergePolicy::Mean => Cell::Num(nums.iter().sum::<f64>() / nums.len() as f64),
        MergePolicy::Median => {
            nums.sort_by(f64::total_cmp);
            let m = nums.len() / 2;
            Cell::Num(if nums.len() % 2 == 1 {
                nums[m]
            } else {
                (nums[m - 1] + nums[m]) / 2.0
            })
        }
    }
}

/// Collapses every duplicate group to a single row.
///
/// Identical-value groups keep their shared value whatever the policy.
/// Returns the resolved series and one log entry per collapsed group.
pub fn resolve_duplicates(s: &TimedSeries, policy: MergePolicy) -> (TimedSeries, Vec<Resolution>) {
    let mut timestamps = Vec::with_capacity(s.len());
    let mut values = Vec::with_capacity(s.len());
    let mut log = Vec::new();
    let n = s.len();
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && s.timestamps[j] == s.timestamps[i] {
            j += 1;
        }
        if j - i == 1 {
            timestamps.push(s.timestamps[i]);
            values.push(s.values[i].clone());
        } else {
            let group: Vec<&Cell> = s.values[i..j].iter().collect();
            let kept = merge_cells(&group, policy);
            let mut present = group.iter().filter(|c| !c.is_missing());
            let same_value = match present.next() {
                Some(f) => present.all(|c| c.same_value(f)),
                None => true,
            };
            log.push(Resolution {
                timestamp: s.timestamps[i],
                rows: j - i,
                same_value,
                kept: kept.clone(),
            });
            timestamps.push(s.timestamps[i]);
            values.push(kept);
        }
        i = j;
    }
    (TimedSeries::new(timestamps, values), log)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalReport {
    pub expected: Millis,
    pub tolerance: Millis,
    pub total_intervals: usize,
    pub normal_intervals: usize,
    /// Fraction of normal intervals; `None` when fewer than two samples.
    pub pti: Option<f64>,
    /// Index `i` marks the interval between samples `i` and `i + 1`.
    pub irregular_positions: Vec<usize>,
}

/// Counts intervals within `tolerance` of `expected`.
pub fn interval_analysis(s: &TimedSeries, expected: Millis, tolerance: Millis) -> IntervalReport {
    let mut irregular = Vec::new();
    let mut normal = 0;
    for (i, w) in s.timestamps.windows(2).enumerate() {
        if ((w[1] - w[0]) - expected).abs() <= tolerance {
            normal += 1;
        } else {
            irregular.push(i);
        }
    }
    let total = s.len().saturating_sub(1);
    IntervalReport {
        expected,
        tolerance,
        total_intervals: total,
        normal_intervals: normal,
        pti: (total > 0).then(|| normal as f64 / total as f64),
        irregular_positions: irregular,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularGrid {
    pub start: Instant,
    pub end: Instant,
    pub interval: Millis,
    pub slots: usize,
}

impl RegularGrid {
    pub fn slot_time(&self, slot: usize) -> Instant {
        self.start + slot as i64 * self.interval
    }

    pub fn last(&self) -> Instant {
        self.slot_time(self.slots - 1)
    }

    pub fn timestamps(&self) -> Vec<Instant> {
        (0..self.slots).map(|i| self.slot_time(i)).collect()
    }

    /// Nearest slot, ties to the earlier one. `None` when `t` lies more than
    /// half an interval outside the grid.
    pub fn nearest_slot(&self, t: Instant) -> Option<usize> {
        let half = self.interval as i128;
        let offset = (t - self.start) as i128;
        if 2 * offset < -half || 2 * (t - self.last()) as i128 > half {
            return None;
        }
        let base = offset.div_euclid(self.interval as i128);
        let rem = offset.rem_euclid(self.interval as i128);
        let slot = if 2 * rem > half { base + 1 } else { base };
        Some(slot.max(0) as usize)
    }
}

pub fn build_grid(start: Instant, end: Instant, interval: Millis) -> Result<RegularGrid> {
    if interval <= 0 {
        return Err(Error::Config(format!("grid interval must be positive, got {interval} ms")));
    }
    if start > end {
        return Err(Error::Config("grid start is after grid end".into()));
    }
    let slots = ((end - start) / interval) as usize + 1;
    Ok(RegularGrid {
        start,
        end,
        interval,
        slots,
    })
}

/// Rounds to the nearest multiple of `interval`, ties downward.
pub fn round_to_interval(t: Instant, interval: Millis) -> Instant {
    let base = t.div_euclid(interval) * interval;
    if 2 * (t - base) > interval {
        base + interval
    } else {
        base
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentStats {
    /// Input samples assigned to a slot.
    pub assigned: usize,
    /// Input samples outside the grid's reach.
    pub dropped: usize,
    /// Slots that received more than one sample.
    pub merged_slots: usize,
    /// Slots that received no sample.
    pub empty_slots: usize,
}

/// Places each sample on its nearest grid slot.
///
/// Slots that receive several samples are merged with `policy`; slots that
/// receive none are missing.
pub fn align_to_grid(
    s: &TimedSeries,
    grid: &RegularGrid,
    policy: MergePolicy,
) -> (TimedSeries, AlignmentStats) {
    let mut stats = AlignmentStats::default();
    let mut buckets: Vec<Vec<&Cell>> = vec![Vec::new(); grid.slots];
    for (t, v) in s.timestamps.iter().zip(&s.values) {
        match grid.nearest_slot(*t) {
            Some(slot) => {
                buckets[slot].push(v);
                stats.assigned += 1;
            }
            None => stats.dropped += 1,
        }
    }
    let values = buckets
        .iter()
        .map(|b| match b.len() {
            0 => {
                stats.empty_slots += 1;
                Cell::Missing
            }
            1 => b[0].clone(),
            _ => {
                stats.merged_slots += 1;
                merge_cells(b, policy)
            }
        })
        .collect();
    if stats.dropped > 0 {
        log::warn!("{} samples fall outside the grid and were dropped", stats.dropped);
    }
    (TimedSeries::new(grid.timestamps(), values), stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn series(ts: &[i64], vs: &[f64]) -> TimedSeries {
        TimedSeries::new(ts.to_vec(), vs.iter().copied().map(Cell::Num).collect())
    }

    #[test]
    fn duplicate_classification() {
        let r = detect_duplicates(&series(&[1, 1, 2], &[5.0, 5.0, 7.0]));
        assert_eq!((r.dts, r.dtd), (1, 0));
        assert_eq!(r.groups[0].rows, vec![0, 1]);
        let r = detect_duplicates(&series(&[1, 1], &[5.0, 6.0]));
        assert_eq!((r.dts, r.dtd), (0, 1));
    }

    #[test]
    fn missing_does_not_break_same_value() {
        let s = TimedSeries::new(vec![1, 1, 1], vec![Cell::Num(3.0), Cell::Missing, Cell::Num(3.0)]);
        let r = detect_duplicates(&s);
        assert_eq!((r.dts, r.dtd), (1, 0));
    }

    #[test]
    fn resolution_policies() {
        for policy in [MergePolicy::First, MergePolicy::Mean, MergePolicy::Median] {
            let (out, _) = resolve_duplicates(&series(&[1, 1], &[5.0, 5.0]), policy);
            assert_eq!(out, series(&[1], &[5.0]));
        }
        let (out, log) = resolve_duplicates(&series(&[1, 1], &[4.0, 8.0]), MergePolicy::Mean);
        assert_eq!(out, series(&[1], &[6.0]));
        assert_eq!(log.len(), 1);
        assert!(!log[0].same_value);
        // Brute force: the median of {1, 2, 9} is the middle order statistic.
        let (out, _) = resolve_duplicates(&series(&[1, 1, 1], &[1.0, 2.0, 9.0]), MergePolicy::Median);
        assert_eq!(out, series(&[1], &[2.0]));
        let (out, _) = resolve_duplicates(&series(&[1, 1, 1], &[9.0, 2.0, 1.0]), MergePolicy::First);
        assert_eq!(out, series(&[1], &[9.0]));
    }

    #[test]
    fn all_missing_group_collapses_to_missing() {
        let s = TimedSeries::new(vec![1, 1], vec![Cell::Missing, Cell::Missing]);
        let (out, _) = resolve_duplicates(&s, MergePolicy::Median);
        assert_eq!(out.values, vec![Cell::Missing]);
    }

    #[test]
    fn categorical_dtd_keeps_first() {
        let s = TimedSeries::new(vec![1, 1], vec![Cell::Cat("b".into()), Cell::Cat("a".into())]);
        let (out, _) = resolve_duplicates(&s, MergePolicy::Median);
        assert_eq!(out.values, vec![Cell::Cat("b".into())]);
    }

    #[test]
    fn interval_pti() {
        let r = interval_analysis(&series(&[0, 10_000, 20_000, 30_000], &[0.0; 4]), 10_000, 0);
        assert_eq!(r.pti, Some(1.0));
        // Intervals 10, 15, 10 s: two of three are normal.
        let r = interval_analysis(&series(&[0, 10_000, 25_000, 35_000], &[0.0; 4]), 10_000, 0);
        assert_eq!(r.total_intervals, 3);
        assert_eq!(r.normal_intervals, 2);
        assert_eq!(r.pti, Some(2.0 / 3.0));
        assert_eq!(r.irregular_positions, vec![1]);
        let r = interval_analysis(&series(&[0, 10_000, 25_000, 35_000], &[0.0; 4]), 10_000, 5_000);
        assert_eq!(r.pti, Some(1.0));
        let r = interval_analysis(&series(&[0], &[0.0]), 10_000, 0);
        assert_eq!(r.pti, None);
    }

    #[test]
    fn grid_construction() {
        let g = build_grid(0, 30_000, 10_000).unwrap();
        assert_eq!(g.timestamps(), vec![0, 10_000, 20_000, 30_000]);
        assert_eq!(build_grid(5, 5, 10).unwrap().slots, 1);
        // floor(35 / 10) + 1 = 4 slots.
        let g = build_grid(0, 35_000, 10_000).unwrap();
        assert_eq!(g.timestamps(), vec![0, 10_000, 20_000, 30_000]);
        assert!(matches!(build_grid(0, 10, 0), Err(Error::Config(_))));
        assert!(build_grid(10, 0, 1).is_err());
    }

    #[test]
    fn rounding() {
        assert_eq!(round_to_interval(14_000, 10_000), 10_000);
        assert_eq!(round_to_interval(15_000, 10_000), 10_000);
        assert_eq!(round_to_interval(16_000, 10_000), 20_000);
        assert_eq!(round_to_interval(-4_000, 10_000), 0);
    }

    #[test]
    fn nearest_slot_assignment() {
        let g = build_grid(0, 20_000, 10_000).unwrap();
        let s = series(&[0, 10_400, 19_800], &[1.0, 2.0, 3.0]);
        let (out, stats) = align_to_grid(&s, &g, MergePolicy::Mean);
        assert_eq!(out.numeric(), vec![Some(1.0), Some(2.0), Some(3.0)]);
        assert_eq!(stats.empty_slots, 0);

        let s = series(&[9_600, 10_400], &[1.0, 2.0]);
        let (out, stats) = align_to_grid(&s, &g, MergePolicy::Mean);
        assert_eq!(out.numeric(), vec![None, Some(1.5), None]);
        assert_eq!(stats.merged_slots, 1);
        assert_eq!(stats.empty_slots, 2);
    }

    #[test]
    fn midpoint_goes_to_earlier_slot_and_edges() {
        let g = build_grid(0, 20_000, 10_000).unwrap();
        assert_eq!(g.nearest_slot(5_000), Some(0));
        assert_eq!(g.nearest_slot(15_000), Some(1));
        assert_eq!(g.nearest_slot(-5_000), Some(0));
        assert_eq!(g.nearest_slot(-5_001), None);
        assert_eq!(g.nearest_slot(25_000), Some(2));
        assert_eq!(g.nearest_slot(25_001), None);
        let (_, stats) = align_to_grid(&series(&[-6_000, 1_000], &[1.0, 2.0]), &g, MergePolicy::First);
        assert_eq!((stats.assigned, stats.dropped), (1, 1));
    }

    fn arb_series() -> impl Strategy<Value = TimedSeries> {
        prop::collection::vec((0i64..200, prop::option::of(0u8..4)), 1..60).prop_map(|mut v| {
            v.sort_by_key(|x| x.0);
            TimedSeries::new(
                v.iter().map(|x| x.0 * 1000).collect(),
                v.iter()
                    .map(|x| x.1.map_or(Cell::Missing, |n| Cell::Num(n as f64)))
                    .collect(),
            )
        })
    }

    proptest! {
        #[test]
        fn resolve_is_idempotent_and_clean(s in arb_series(), pol in 0usize..3) {
            let policy = [MergePolicy::First, MergePolicy::Mean, MergePolicy::Median][pol];
            let (once, _) = resolve_duplicates(&s, policy);
            let (twice, log) = resolve_duplicates(&once, policy);
            prop_assert_eq!(&once, &twice);
            prop_assert!(log.is_empty());
            let d = detect_duplicates(&once);
            prop_assert_eq!((d.dts, d.dtd), (0, 0));
            prop_assert!(once.timestamps.windows(2).all(|w| w[0] < w[1]));
            let d = detect_duplicates(&s);
            prop_assert_eq!(d.dts + d.dtd, d.groups.len());
            prop_assert!(d.groups.iter().all(|g| g.rows.len() >= 2));
        }

        #[test]
        fn pti_bounds(s in arb_series(), tol in 0i64..3) {
            let (s, _) = resolve_duplicates(&s, MergePolicy::First);
            let r = interval_analysis(&s, 1000, tol * 1000);
            if let Some(p) = r.pti {
                prop_assert!((0.0..=1.0).contains(&p));
                prop_assert_eq!(p == 1.0, r.irregular_positions.is_empty());
            }
        }

        #[test]
        fn alignment_conserves_and_is_idempotent(s in arb_series(), start in -20i64..50, width in 0i64..200, step in 1i64..7) {
            let (s, _) = resolve_duplicates(&s, MergePolicy::First);
            let grid = build_grid(start * 1000, (start + width) * 1000, step * 1000).unwrap();
            let (aligned, stats) = align_to_grid(&s, &grid, MergePolicy::Median);
            prop_assert_eq!(stats.assigned + stats.dropped, s.len());
            prop_assert_eq!(&aligned.timestamps, &grid.timestamps());
            prop_assert!(aligned.timestamps.windows(2).all(|w| w[0] < w[1]));
            let (again, stats2) = align_to_grid(&aligned, &grid, MergePolicy::Median);
            prop_assert_eq!(&again, &aligned);
            prop_assert_eq!(stats2.dropped, 0);
        }
    }
}
