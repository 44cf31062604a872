//! Autocorrelation over series with gaps.

use crate::values::stats::compensated_sum;

/// Sample autocorrelation for lags `0..=max_lag`.
///
/// Lag products use only pairs where both samples are present; every term is
/// centred on the mean of all present values and normalised by their total
/// sum of squares. `None` for constant or empty input.
pub fn autocorrelation(values: &[Option<f64>], max_lag: usize) -> Option<Vec<f64>> {
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    let first = *present.first()?;
    if present.iter().all(|v| *v == first) {
        return None;
    }
    let mean = compensated_sum(present.iter().copied()) / present.len() as f64;
    let centred: Vec<f64> = values
        .iter()
        .map(|v| v.map_or(f64::NAN, |x| x - mean))
        .collect();
    let denom = compensated_sum(present.iter().map(|v| (v - mean) * (v - mean)));
    if denom <= 0.0 {
        return None;
    }
    let mut acf = Vec::with_capacity(max_lag + 1);
    acf.push(1.0);
    for lag in 1..=max_lag {
        let num = if lag < centred.len() {
            compensated_sum(
                centred[..centred.len() - lag]
                    .iter()
                    .zip(&centred[lag..])
                    .map(|(a, b)| a * b)
                    .filter(|p| !p.is_nan()),
            )
        } else {
            0.0
        };
        acf.push(num / denom);
    }
    Some(acf)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn some(v: &[f64]) -> Vec<Option<f64>> {
        v.iter().copied().map(Some).collect()
    }

    #[test]
    fn lag_zero_is_one() {
        let acf = autocorrelation(&some(&[1.0, 5.0, 2.0, 8.0]), 2).unwrap();
        assert_eq!(acf[0], 1.0);
        assert_eq!(acf.len(), 3);
    }

    #[test]
    fn alternating_series() {
        let v: Vec<f64> = (0..1000).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let acf = autocorrelation(&some(&v), 2).unwrap();
        // Closed form: 999 products of -1 over 1000 squares.
        assert!((acf[1] + 0.999).abs() < 1e-12);
        assert!((acf[2] - 0.998).abs() < 1e-12);
    }

    #[test]
    fn undefined_cases() {
        assert!(autocorrelation(&some(&[3.0; 10]), 3).is_none());
        assert!(autocorrelation(&[None, None], 3).is_none());
    }

    #[test]
    fn gaps_are_skipped() {
        let v = [Some(1.0), None, Some(3.0), Some(1.0), Some(3.0)];
        // mean 2, deviations -1, _, 1, -1, 1; denom 4
        // lag 1: (2,3),(3,4) -> -2; lag 2: (0,2),(2,4) -> 0
        // lag 3: (0,3) -> 1; lag 4: (0,4) -> -1
        let acf = autocorrelation(&v, 4).unwrap();
        assert_eq!(acf, vec![1.0, -0.5, 0.0, 0.25, -0.25]);
    }

    #[test]
    fn lags_beyond_length_are_zero() {
        let acf = autocorrelation(&some(&[1.0, 2.0]), 4).unwrap();
        assert_eq!(acf[2..], [0.0, 0.0, 0.0]);
    }
}
