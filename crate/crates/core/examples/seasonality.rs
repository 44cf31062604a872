//! Autocorrelation, seasonal decomposition and the seasonality flag.

use std::f64::consts::PI;

use sixvs::values::{autocorrelation, decompose, detect_seasonality, DecompositionModel};

pub fn run() -> sixvs::Result<()> {
    let period = 24;
    let x: Vec<Option<f64>> = (0..period * 10)
        .map(|t| {
            let t = t as f64;
            Some(50.0 + 0.02 * t + 3.0 * (2.0 * PI * t / period as f64).sin())
        })
        .collect();

    if let Some(acf) = autocorrelation(&x, period) {
        println!("acf at lag 1 = {:.3}, lag {period} = {:.3}", acf[1], acf[period]);
    }

    let d = decompose(&x, period, DecompositionModel::Additive)?;
    let mid = x.len() / 2;
    println!(
        "t={mid}: trend {:.3} + seasonal {:.3} + residual {:.3}",
        d.trend[mid].unwrap_or(f64::NAN),
        d.seasonal[mid].unwrap_or(f64::NAN),
        d.residual[mid].unwrap_or(f64::NAN)
    );

    let flag = detect_seasonality(&x, &[12, 24, 96], 0.05);
    println!("seasonal = {} (period {:?})", flag.seasonal, flag.period);
    let flat = vec![Some(1.0); 200];
    println!("constant series seasonal = {}", detect_seasonality(&flat, &[24], 0.05).seasonal);
    Ok(())
}

fn main() -> sixvs::Result<()> {
    run()
}
