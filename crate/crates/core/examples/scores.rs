//! The six scores computed directly from summary indicators of two
//! industrial datasets.

use sixvs::features::{CorrelationMatrix, CrossCorrelationResult};
use sixvs::scoring::{
    score_value, score_variability_with_matrix, score_variety, score_velocity, score_veracity,
    score_volume, VeracityInputs,
};
use sixvs::values::FormDistribution;

fn matrix(n: usize, high: usize) -> CorrelationMatrix {
    let features: Vec<String> = (1..=n).map(|i| format!("F{i}")).collect();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            pairs.push(CrossCorrelationResult {
                feature_a: features[i].clone(),
                feature_b: features[j].clone(),
                best_value: Some(if pairs.len() < high { 0.9 } else { 0.3 }),
                best_lag: 0,
            });
        }
    }
    CorrelationMatrix { features, pairs, diagonal: Vec::new() }
}

pub fn run() {
    let furnace_pmv = (0.00044 + 5.0 * 0.00023) / 7.0;
    let ver = score_veracity(
        &VeracityInputs { pcdf: 1.0, mean_nas: 239.0 / 7.0, ni: 1_624_430, mean_pti: 0.9998, mean_pmv: furnace_pmv },
        [0.25; 4],
    );
    let varia = score_variability_with_matrix(
        &[6837.38, 461.15, 5.28, 11.68, 14.55, 14.18, 14.79],
        &[0.01282, 0.0, 0.0, 0.0001, 0.0, 0.0, 0.0],
        &matrix(7, 12),
        0.7,
        [1.0 / 3.0; 3],
    );
    println!("furnace");
    println!("  Vol   = {}", score_volume(7, 1_624_430));
    println!("  Varie = {}", score_variety(&FormDistribution::ALL_STRUCTURED));
    println!("  Vel   = {} s", score_velocity(1.0));
    println!("  Ver   = {:.4e}", ver.map_or(f64::NAN, |v| v.ver));
    println!("  Val   = {:?}", score_value(11, 70));
    if let Some(v) = varia {
        println!("  Varia = {:.4} (Nstd {:.4}, Po {:.4}, Vc {:.4})", v.varia.unwrap_or(f64::NAN), v.nstd, v.po, v.vc.unwrap_or(f64::NAN));
    }
}

fn main() {
    run()
}
