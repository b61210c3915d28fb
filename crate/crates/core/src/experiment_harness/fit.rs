use crate::error::{Error, Result};
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope; zero when there are only two points.
    pub stderr: f64,
    pub r2: f64,
}

/// Ordinary least squares y = a + b x.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> LineFit {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    let stderr = if xs.len() > 2 { (sse / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    LineFit { slope, intercept, stderr, r2 }
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        0.5 * (values[m - 1] + values[m])
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub stderr: f64,
    pub r2: f64,
    pub intercept: f64,
    /// (N, median t_mix) pairs the line was fitted to.
    pub medians: Vec<(usize, f64)>,
}

/// Log-log slope of the per-N median of `t` against N. Needs at least four
/// distinct N with at least three samples each.
pub fn fit_exponent(rows: &[(usize, f64)]) -> Result<ExponentFit> {
    let mut by_n: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for &(n, t) in rows {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("t_mix must be positive and finite, got {t} at N = {n}")));
        }
        by_n.entry(n).or_default().push(t);
    }
    if by_n.len() < 4 {
        return Err(Error::InsufficientData(format!("need >= 4 distinct N, got {}", by_n.len())));
    }
    if let Some((n, v)) = by_n.iter().find(|(_, v)| v.len() < 3) {
        return Err(Error::InsufficientData(format!("N = {n} has {} samples, need >= 3", v.len())));
    }
    let medians: Vec<(usize, f64)> = by_n.into_iter().map(|(n, mut v)| (n, median(&mut v))).collect();
    let xs: Vec<f64> = medians.iter().map(|(n, _)| (*n as f64).ln()).collect();
    let ys: Vec<f64> = medians.iter().map(|(_, t)| t.ln()).collect();
    let f = least_squares(&xs, &ys);
    Ok(ExponentFit { slope: f.slope, stderr: f.stderr, r2: f.r2, intercept: f.intercept, medians })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synth(f: impl Fn(f64) -> f64, ks: std::ops::RangeInclusive<u32>) -> Vec<(usize, f64)> {
        ks.flat_map(|k| {
            let n = 1usize << k;
            (0..3).map(move |_| (n, n as f64))
        })
        .map(|(n, x)| (n, f(x)))
        .collect()
    }

    #[test]
    fn exact_power_law() {
        let fit = fit_exponent(&synth(|n| n * n, 9..=14)).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.r2 - 1.0).abs() < 1e-12);
        assert!(fit.stderr < 1e-10);
    }

    #[test]
    fn polylog_slope_is_small() {
        // d ln((ln N)^3) / d ln N = 3 / ln N, about 0.38 on this range, so a 0.3 cut does not hold
        let fit = fit_exponent(&synth(|n| n.ln().powi(3), 9..=14)).unwrap();
        assert!((fit.slope - 0.3813).abs() < 1e-3, "{}", fit.slope);
    }

    #[test]
    fn rejects_thin_data() {
        assert!(matches!(fit_exponent(&synth(|n| n, 9..=11)), Err(Error::InsufficientData(_))));
        let mut rows = synth(|n| n, 9..=12);
        rows.pop();
        assert!(matches!(fit_exponent(&rows), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn median_is_robust() {
        let mut rows = synth(|n| n, 9..=12);
        rows.push((512, 1e12));
        rows.push((512, 1e12));
        rows.push((512, 1.0));
        let fit = fit_exponent(&rows).unwrap();
        assert!((fit.slope - 1.0).abs() < 1e-12);
    }
}
