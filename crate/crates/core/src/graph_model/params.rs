use crate::error::{Error, Result};
use crate::scalar::Real;
use serde::{Deserialize, Serialize};

/// Model parameters. `gamma = alpha * (tau - 1)` is derived, never set.
/// The long-range model is represented by `tau = +inf` (all weights equal 1).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseParams<T> {
    pub alpha: T,
    pub tau: T,
    pub gamma: T,
    pub eps: Option<T>,
}

impl<T: Real> PhaseParams<T> {
    pub fn new(alpha: T, tau: T) -> Result<Self> {
        if !(alpha > T::zero()) || !alpha.is_finite() {
            return Err(Error::param("alpha", format!("must be positive and finite, got {alpha:?}")));
        }
        if !(tau > T::one()) {
            return Err(Error::param("tau", format!("must exceed 1, got {tau:?}")));
        }
        let gamma = if tau.is_infinite() { T::infinity() } else { alpha * (tau - T::one()) };
        Ok(PhaseParams { alpha, tau, gamma, eps: None })
    }

    pub fn long_range(alpha: T) -> Result<Self> {
        Self::new(alpha, T::infinity())
    }

    pub fn is_long_range(&self) -> bool {
        self.tau.is_infinite()
    }

    /// Attaches the coarse-graining slack. Only meaningful when
    /// `1 < gamma < 2` and `1 < tau < 2`.
    pub fn with_eps(mut self, eps: T) -> Result<Self> {
        let one = T::one();
        let two = one + one;
        if !(self.gamma > one && self.gamma < two && self.tau > one && self.tau < two) {
            return Err(Error::param(
                "eps",
                format!("coarse-graining needs 1 < gamma < 2 and 1 < tau < 2 (gamma = {:?}, tau = {:?})", self.gamma, self.tau),
            ));
        }
        let upper = (self.gamma - one).min((two - self.gamma) / two);
        if !(eps > T::zero() && eps < upper) {
            return Err(Error::param("eps", format!("must lie in (0, {upper:?}), got {eps:?}")));
        }
        self.eps = Some(eps);
        Ok(self)
    }
}

/// Inverse-CDF draw from P(W >= t) = t^{-(tau-1)}, t >= 1, for u in [0, 1).
pub fn pareto_quantile<T: Real>(u: T, tau: T) -> T {
    if tau.is_infinite() {
        return T::one();
    }
    (T::one() - u).powf(-T::one() / (tau - T::one()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_is_derived() {
        let p = PhaseParams::new(3.0, 1.5).unwrap();
        assert_eq!(p.gamma, 1.5);
        assert!(PhaseParams::new(1.0, 1.0).is_err());
        assert!(PhaseParams::new(-1.0, 2.0).is_err());
        let lr = PhaseParams::<f64>::long_range(1.5).unwrap();
        assert!(lr.gamma.is_infinite() && lr.is_long_range());
    }

    #[test]
    fn eps_window() {
        let p = PhaseParams::new(3.0, 1.5).unwrap();
        assert!(p.with_eps(0.1).is_ok());
        assert!(p.with_eps(0.25).is_err());
        assert!(p.with_eps(0.0).is_err());
        assert!(PhaseParams::new(0.6, 2.5).unwrap().with_eps(0.01).is_err());
    }

    #[test]
    fn quantile_in_f32_and_f64() {
        assert_eq!(pareto_quantile(0.0_f64, 2.5), 1.0);
        assert!((pareto_quantile(0.75_f64, 3.0) - 2.0).abs() < 1e-12);
        assert!((pareto_quantile(0.75_f32, 3.0) - 2.0).abs() < 1e-5);
    }
}
