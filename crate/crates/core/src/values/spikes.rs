//! Rule-based abnormal spike detection.

use serde::{Deserialize, Serialize};

use crate::series::{Instant, TimedSeries};
use crate::values::stats::population_std;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpikeEvent {
    pub index: usize,
    pub timestamp: Instant,
    pub value: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SpikeReport {
    pub nas: usize,
    pub events: Vec<SpikeEvent>,
    /// Standard deviation of first differences used as the jump scale.
    pub diff_std: Option<f64>,
    pub insufficient_data: bool,
}

/// Flags interior points that jump away from both neighbours.
///
/// Point `t` is a spike when `x[t] - x[t-1]` and `x[t] - x[t+1]` share a
/// sign and both exceed `k` times the population std of first differences
/// (taken over adjacent present pairs). With `bounds`, any interior value
/// outside `[min, max]` is a spike as well. Endpoints are never flagged.
pub fn detect_spikes(s: &TimedSeries, k: f64, bounds: Option<(f64, f64)>) -> SpikeReport {
    let x = s.numeric();
    if x.iter().flatten().count() < 3 {
        return SpikeReport {
            insufficient_data: true,
            ..SpikeReport::default()
        };
    }
    let diffs: Vec<f64> = x
        .windows(2)
        .filter_map(|w| Some(w[1]? - w[0]?))
        .collect();
    let diff_std = population_std(&diffs);
    let threshold = diff_std.map(|sd| k * sd);

    let mut events = Vec::new();
    for t in 1..x.len().saturating_sub(1) {
        let Some(v) = x[t] else { continue };
        let out_of_bounds = bounds.is_some_and(|(lo, hi)| v < lo || v > hi);
        let jump = match (x[t - 1], x[t + 1], threshold) {
            (Some(prev), Some(next), Some(th)) => {
                let (a, b) = (v - prev, v - next);
                a.signum() == b.signum() && a != 0.0 && a.abs() > th && b.abs() > th
            }
            _ => false,
        };
        if jump || out_of_bounds {
            events.push(SpikeEvent {
                index: t,
                timestamp: s.timestamps[t],
                value: v,
            });
        }
    }
    SpikeReport {
        nas: events.len(),
        events,
        diff_std,
        insufficient_data: false,
    }
}
