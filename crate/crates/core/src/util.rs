//! Small numeric helpers shared across the analysis modules.

use serde::Serialize;

/// Finite-horizon boundedness rule: the sup over the last three quarters of
/// the span must not exceed the sup over `[T/16, T/4]` by more than 1%.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundednessVerdict {
    pub bounded: bool,
    pub sup_early: f64,
    pub sup_late: f64,
    pub growth_ratio: f64,
}

pub fn windowed_bounded(ts: &[f64], vals: &[f64]) -> BoundednessVerdict {
    assert_eq!(ts.len(), vals.len());
    let (t0, t1) = (ts[0], *ts.last().unwrap());
    let len = t1 - t0;
    let mut sup_early = 0.0f64;
    let mut sup_late = 0.0f64;
    for (t, v) in ts.iter().zip(vals) {
        let frac = (t - t0) / len;
        if (1.0 / 16.0..=0.25).contains(&frac) {
            sup_early = sup_early.max(v.abs());
        }
        if frac >= 0.25 {
            sup_late = sup_late.max(v.abs());
        }
    }
    let growth_ratio = if sup_early > 0.0 { sup_late / sup_early } else { f64::INFINITY };
    BoundednessVerdict {
        bounded: sup_late <= 1.01 * sup_early + 1e-12,
        sup_early,
        sup_late,
        growth_ratio,
    }
}

/// Least-squares slope and intercept of `v` against `t`.
pub fn linear_fit(ts: &[f64], vals: &[f64]) -> (f64, f64) {
    let n = ts.len() as f64;
    let mt = ts.iter().sum::<f64>() / n;
    let mv = vals.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (t, v) in ts.iter().zip(vals) {
        num += (t - mt) * (v - mv);
        den += (t - mt) * (t - mt);
    }
    let slope = if den > 0.0 { num / den } else { 0.0 };
    (slope, mv - slope * mt)
}

/// Times and values of the local maxima of `|v|` (the amplitude envelope).
pub fn envelope_peaks(ts: &[f64], vals: &[f64]) -> Vec<(f64, f64)> {
    let mut peaks = Vec::new();
    for i in 1..vals.len().saturating_sub(1) {
        let a = vals[i - 1].abs();
        let b = vals[i].abs();
        let c = vals[i + 1].abs();
        if b >= a && b > c {
            peaks.push((ts[i], b));
        }
    }
    peaks
}

/// Sup of `|v|` over `m` equal time windows.
pub fn window_sups(ts: &[f64], vals: &[f64], m: usize) -> Vec<f64> {
    let (t0, t1) = (ts[0], *ts.last().unwrap());
    let len = (t1 - t0).max(f64::MIN_POSITIVE);
    let mut sups = vec![0.0f64; m];
    for (t, v) in ts.iter().zip(vals) {
        let k = (((t - t0) / len) * m as f64).floor().min(m as f64 - 1.0).max(0.0) as usize;
        sups[k] = sups[k].max(v.abs());
    }
    sups
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundedness_rule() {
        let ts: Vec<f64> = (0..=1000).map(|k| k as f64 * 0.1).collect();
        let flat: Vec<f64> = ts.iter().map(|t| (1.0 - (-t).exp()).sin().abs() + 1.0).collect();
        assert!(windowed_bounded(&ts, &flat).bounded);
        let grow: Vec<f64> = ts.iter().map(|t| t * 0.5).collect();
        assert!(!windowed_bounded(&ts, &grow).bounded);
    }

    #[test]
    fn fit_recovers_slope() {
        let ts: Vec<f64> = (0..100).map(|k| k as f64).collect();
        let vals: Vec<f64> = ts.iter().map(|t| 0.5 * t + 3.0).collect();
        let (s, b) = linear_fit(&ts, &vals);
        assert!((s - 0.5).abs() < 1e-12);
        assert!((b - 3.0).abs() < 1e-9);
    }
}
