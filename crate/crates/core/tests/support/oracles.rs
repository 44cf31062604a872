//! Direct-formula oracles and the randomized suites that compare the
//! library against them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use sixvs::config::QuantileMethod;
use sixvs::series::TimedSeries;
use sixvs::values::{autocorrelation, detect_outliers, moments, quantile_sorted};

pub const SEED: u64 = 0x6_5eed;
pub const CASES: usize = 1000;
pub const MAX_LEN: usize = 10_000;
pub const REL_TOL: f64 = 1e-9;

pub fn close(a: f64, b: f64) -> bool {
    let d = (a - b).abs();
    d <= REL_TOL * a.abs().max(b.abs()) || d <= 1e-12
}

/// Random sample drawn from one of several shapes, including heavy ties
/// and heavy tails.
pub fn sample(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let shape = rng.random_range(0..5);
    let scale = 10f64.powi(rng.random_range(-3..5));
    let offset = rng.random_range(-1000.0..1000.0);
    let normal = Normal::new(0.0, 1.0).unwrap();
    (0..len)
        .map(|_| match shape {
            0 => offset + scale * rng.random::<f64>(),
            1 => offset + scale * normal.sample(rng),
            2 => rng.random_range(0..7) as f64,
            3 => {
                let u: f64 = rng.random_range(1e-6..1.0);
                scale * u.powf(-0.7)
            }
            _ => {
                if rng.random_bool(0.03) {
                    offset + scale * 50.0 * normal.sample(rng)
                } else {
                    offset + scale * normal.sample(rng)
                }
            }
        })
        .collect()
}

fn length(rng: &mut ChaCha8Rng) -> usize {
    // Log-uniform over 1..=MAX_LEN, with the maximum itself always covered.
    if rng.random_bool(0.02) {
        return MAX_LEN;
    }
    let e = rng.random_range(0.0..(MAX_LEN as f64).ln());
    (e.exp() as usize).clamp(1, MAX_LEN)
}

fn with_gaps(rng: &mut ChaCha8Rng, values: &[f64]) -> Vec<Option<f64>> {
    let p = rng.random_range(0.0..0.2);
    values
        .iter()
        .map(|v| (!rng.random_bool(p)).then_some(*v))
        .collect()
}

/// Order statistic `k` (0-based) by selection rather than sorting.
pub fn order_stat(values: &[f64], k: usize) -> f64 {
    let mut v = values.to_vec();
    let (_, x, _) = v.select_nth_unstable_by(k, f64::total_cmp);
    *x
}

pub fn oracle_quantile(values: &[f64], p: f64, method: QuantileMethod) -> f64 {
    let n = values.len();
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    let a = order_stat(values, lo);
    let b = order_stat(values, hi);
    match method {
        QuantileMethod::Linear => a + (h - lo as f64) * (b - a),
        QuantileMethod::Lower => a,
        QuantileMethod::Higher => b,
        QuantileMethod::Midpoint => (a + b) / 2.0,
        QuantileMethod::Nearest => order_stat(values, h.round() as usize),
    }
}

pub struct OracleMoments {
    pub mean: f64,
    pub std: f64,
    pub skewness: f64,
    pub kurtosis: f64,
}

/// Textbook moments with plain summation. Central moments are taken about
/// a reference point `a` and shifted by the binomial expansion onto the
/// exact mean `a + r`, so the rounding of the mean itself does not leak in.
pub fn oracle_moments(values: &[f64]) -> OracleMoments {
    let n = values.len() as f64;
    let a = values.iter().sum::<f64>() / n;
    let mut p = [0.0; 5];
    for v in values {
        let d = v - a;
        for (k, acc) in p.iter_mut().enumerate() {
            *acc += d.powi(k as i32);
        }
    }
    let e: Vec<f64> = p.iter().map(|s| s / n).collect();
    let r = e[1];
    let m2 = e[2] - r * r;
    let m3 = e[3] - 3.0 * r * e[2] + 3.0 * r * r * e[1] - r.powi(3);
    let m4 = e[4] - 4.0 * r * e[3] + 6.0 * r * r * e[2] - 4.0 * r.powi(3) * e[1] + r.powi(4);
    OracleMoments {
        mean: a + r,
        std: m2.sqrt(),
        skewness: m3 / (m2 * m2.sqrt()),
        kurtosis: m4 / (m2 * m2) - 3.0,
    }
}

/// Autocorrelation straight from its definition.
pub fn oracle_acf(values: &[Option<f64>], max_lag: usize) -> Vec<f64> {
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    let n = present.len() as f64;
    let rough = present.iter().sum::<f64>() / n;
    let mean = rough + present.iter().map(|v| v - rough).sum::<f64>() / n;
    let denom: f64 = present.iter().map(|v| (v - mean).powi(2)).sum();
    (0..=max_lag)
        .map(|k| {
            let mut num = 0.0;
            for t in 0..values.len().saturating_sub(k) {
                if let (Some(a), Some(b)) = (values[t], values[t + k]) {
                    num += (a - mean) * (b - mean);
                }
            }
            num / denom
        })
        .collect()
}

/// Outlier positions by an exhaustive scan against the fences.
pub fn oracle_outliers(values: &[Option<f64>], c: f64) -> Vec<usize> {
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    let q1 = oracle_quantile(&present, 0.25, QuantileMethod::Linear);
    let q3 = oracle_quantile(&present, 0.75, QuantileMethod::Linear);
    let (lo, hi) = (q1 - c * (q3 - q1), q3 + c * (q3 - q1));
    let mut out = Vec::new();
    for (i, v) in values.iter().enumerate() {
        if let Some(v) = v {
            if *v < lo || *v > hi {
                out.push(i);
            }
        }
    }
    out
}

const METHODS: [QuantileMethod; 5] = [
    QuantileMethod::Linear,
    QuantileMethod::Lower,
    QuantileMethod::Higher,
    QuantileMethod::Midpoint,
    QuantileMethod::Nearest,
];

pub fn quantile_suite(seed: u64, cases: usize) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..cases {
        let n = length(&mut rng);
        let x = sample(&mut rng, n);
        let mut sorted = x.clone();
        sorted.sort_by(f64::total_cmp);
        let mut ps = vec![0.0, 0.25, 0.5, 0.75, 1.0];
        ps.push(rng.random::<f64>());
        for p in ps {
            let method = METHODS[rng.random_range(0..METHODS.len())];
            let got = quantile_sorted(&sorted, p, method).unwrap();
            let want = oracle_quantile(&x, p, method);
            if !close(got, want) {
                return Err(format!("case {case}: n={n} p={p} {method:?}: {got} vs {want}"));
            }
        }
    }
    Ok(cases)
}

pub fn moments_suite(seed: u64, cases: usize) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..cases {
        let n = length(&mut rng).max(2);
        let x = sample(&mut rng, n);
        let got = moments(&x).unwrap();
        if x.iter().all(|v| *v == x[0]) {
            if got.std != 0.0 || got.skewness.is_some() || got.excess_kurtosis.is_some() {
                return Err(format!("case {case}: constant sample has shape factors"));
            }
            continue;
        }
        let want = oracle_moments(&x);
        let pairs = [
            ("mean", got.mean, want.mean),
            ("std", got.std, want.std),
            ("skewness", got.skewness.unwrap(), want.skewness),
            ("kurtosis", got.excess_kurtosis.unwrap(), want.kurtosis),
        ];
        for (name, g, w) in pairs {
            if !close(g, w) {
                return Err(format!("case {case}: n={n} {name}: {g} vs {w}"));
            }
        }
    }
    Ok(cases)
}

pub fn outlier_suite(seed: u64, cases: usize) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    while checked < cases {
        let n = length(&mut rng);
        let x = sample(&mut rng, n);
        let v = with_gaps(&mut rng, &x);
        let c = [1.5, 3.0, rng.random_range(0.5..4.0)][rng.random_range(0..3)];
        let s = TimedSeries::from_numbers((0..n as i64).collect(), &v);
        let present = v.iter().flatten().count();
        let report = detect_outliers(&s, c, QuantileMethod::Linear, None);
        if present < 4 {
            if report.is_some() {
                return Err(format!("n={present}: report for fewer than four values"));
            }
            continue;
        }
        let report = report.unwrap();
        let want = oracle_outliers(&v, c);
        if report.indices != want {
            return Err(format!(
                "case {checked}: n={n} c={c}: {} vs {} outliers",
                report.indices.len(),
                want.len()
            ));
        }
        if report.rate != want.len() as f64 / present as f64 {
            return Err(format!("case {checked}: rate mismatch"));
        }
        checked += 1;
    }
    Ok(checked)
}

pub fn acf_suite(seed: u64, cases: usize) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    while checked < cases {
        let n = length(&mut rng).max(3);
        // Autoregressive shapes give non-trivial correlations.
        let base = sample(&mut rng, n);
        let phi = rng.random_range(-0.95..0.95);
        let mut x = base.clone();
        for t in 1..n {
            x[t] = phi * x[t - 1] + base[t];
        }
        let v = with_gaps(&mut rng, &x);
        let max_lag = rng.random_range(1..=60);
        let got = autocorrelation(&v, max_lag);
        let present: Vec<f64> = v.iter().flatten().copied().collect();
        if present.is_empty() || present.iter().all(|p| *p == present[0]) {
            if got.is_some() {
                return Err("constant input produced an autocorrelation".into());
            }
            continue;
        }
        let got = got.unwrap();
        let want = oracle_acf(&v, max_lag);
        for (k, (g, w)) in got.iter().zip(&want).enumerate() {
            if !close(*g, *w) {
                return Err(format!("case {checked}: n={n} lag {k}: {g} vs {w}"));
            }
        }
        checked += 1;
    }
    Ok(checked)
}
