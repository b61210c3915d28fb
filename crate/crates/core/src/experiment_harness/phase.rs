use crate::error::{Error, Result};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    /// gamma < 1: polylogarithmic mixing.
    I,
    /// 1 < gamma < 2, tau < 2: N^{gamma - 1}.
    Ii,
    /// 1 < alpha < 2, tau > 2: at least N^{alpha - 1}.
    Iii,
    /// alpha > 2, gamma > 2: N^2.
    Iv,
    Unclassified,
}

impl Phase {
    pub fn label(&self) -> &'static str {
        match self {
            Phase::I => "i",
            Phase::Ii => "ii",
            Phase::Iii => "iii",
            Phase::Iv => "iv",
            Phase::Unclassified => "unclassified",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PhasePrediction {
    pub phase: Phase,
    pub gamma: f64,
    /// Predicted log-log slope of t_mix in N, `None` when unclassified.
    pub slope: Option<f64>,
    /// Second candidate slope, present only in the region where the proven
    /// upper and lower exponents differ.
    pub alt_slope: Option<f64>,
    pub note: &'static str,
}

/// Predicted growth exponent of t_mix for the given parameters. `tau` may be
/// infinite (long-range percolation). Points on the lines gamma = 1, 2,
/// alpha = 1, 2 or tau = 2 are unclassified.
pub fn phase_predict(alpha: f64, tau: f64) -> Result<PhasePrediction> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::param("alpha", format!("must be positive and finite, got {alpha}")));
    }
    if !(tau > 1.0) {
        return Err(Error::param("tau", format!("must exceed 1, got {tau}")));
    }
    let gamma = alpha * (tau - 1.0);
    let pred = |phase, slope, alt_slope, note| PhasePrediction { phase, gamma, slope, alt_slope, note };
    let boundary = gamma == 1.0 || gamma == 2.0 || alpha == 1.0 || alpha == 2.0 || tau == 2.0;
    if boundary {
        return Ok(pred(Phase::Unclassified, None, None, "on a phase boundary"));
    }
    Ok(if gamma < 1.0 {
        pred(Phase::I, Some(0.0), None, "polylogarithmic upper bound")
    } else if gamma < 2.0 && tau < 2.0 {
        pred(Phase::Ii, Some(gamma - 1.0), None, "N^(gamma-1) up to a slowly varying factor")
    } else if tau > 2.0 && alpha > 1.0 && alpha < 2.0 {
        if gamma < 2.0 {
            pred(
                Phase::Iii,
                Some(alpha - 1.0),
                Some(gamma - 1.0),
                "conjectured alpha-1, only the lower bound is proven; gamma-1 upper bound provable",
            )
        } else {
            pred(Phase::Iii, Some(alpha - 1.0), None, "lower bound; upper conjectured")
        }
    } else if alpha > 2.0 && gamma > 2.0 {
        pred(Phase::Iv, Some(2.0), None, "order N^2")
    } else {
        pred(Phase::Unclassified, None, None, "not covered by the phase diagram")
    })
}
