use crate::error::{Error, Result};
use crate::scalar::Real;

/// exp(-u^2 / (2 (n sigma2 + m u / 3))) for a sum of n independent centred
/// summands bounded by m with mean variance sigma2.
pub fn bernstein_bound<T: Real>(u: T, n: usize, sigma2: T, m: T) -> Result<T> {
    if !(u > T::zero()) {
        return Err(Error::Domain(format!("Bernstein bound needs u > 0, got {u:?}")));
    }
    if !(sigma2 >= T::zero()) {
        return Err(Error::param("sigma2", format!("must be >= 0, got {sigma2:?}")));
    }
    if !(m > T::zero()) {
        return Err(Error::param("m", format!("must be > 0, got {m:?}")));
    }
    let denom = T::c(2.0) * (T::from_count(n) * sigma2 + m * u / T::c(3.0));
    Ok((-(u * u) / denom).exp())
}

/// (c n y^{1 - gamma} / x)^{x / y}, valid for y <= x. The value is returned
/// as is, so it may exceed 1.
pub fn fuk_nagaev_bound<T: Real>(n: usize, gamma: T, x: T, y: T, c: T) -> Result<T> {
    if !(gamma > T::one()) {
        return Err(Error::param("gamma", format!("must exceed 1, got {gamma:?}")));
    }
    if !(y > T::zero()) {
        return Err(Error::param("y", format!("must be > 0, got {y:?}")));
    }
    if y > x {
        return Err(Error::Domain(format!("Fuk-Nagaev bound needs y <= x, got y = {y:?} > x = {x:?}")));
    }
    if !(c > T::zero()) {
        return Err(Error::param("c", format!("must be > 0, got {c:?}")));
    }
    if n == 0 {
        return Err(Error::param("n", "must be positive"));
    }
    let base = c * T::from_count(n) * y.powf(T::one() - gamma) / x;
    Ok(base.powf(x / y))
}

/// Two-sided z for a 99% normal interval.
pub const Z99: f64 = 2.575_829_303_548_901;

/// Wilson score interval for `k` successes out of `n` trials.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}
