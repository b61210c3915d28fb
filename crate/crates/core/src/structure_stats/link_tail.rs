use crate::error::{Error, Result};
use crate::graph_model::{pareto_quantile, PhaseParams};
use crate::rng::{Purpose, RngStream};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailBranch {
    /// P(x <-> y) <= c d^{-alpha}, tau > 2.
    PowerAlpha,
    /// P(x <-> y) <= c d^{-gamma} (ln d)^2, tau <= 2.
    PowerGammaLog,
}

#[derive(Clone, Debug, Serialize)]
pub struct TailPoint {
    pub d: usize,
    pub estimate: f64,
    pub std_err: f64,
    pub shape: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LinkTailReport {
    pub branch: TailBranch,
    pub points: Vec<TailPoint>,
    pub c: f64,
    /// Distances where the estimate exceeds c * shape by more than 3 standard errors.
    pub violations: Vec<usize>,
    /// Least-squares slope of ln(ratio) against ln d over the upper half of the grid.
    pub tail_slope: f64,
}

/// Monte Carlo estimate of P(x <-> y) = E[1 - exp(-W W' / d^alpha)] over
/// independent weight pairs, compared with the decay shape. When `c` is None
/// it is fitted as the largest observed ratio.
pub fn link_tail_check(
    params: &PhaseParams<f64>,
    distances: &[usize],
    reps: usize,
    seed: u64,
    c: Option<f64>,
) -> Result<LinkTailReport> {
    if distances.iter().any(|&d| d < 2) || distances.is_empty() {
        return Err(Error::param("distances", "need a non-empty grid with every d >= 2"));
    }
    if reps < 2 {
        return Err(Error::param("reps", "need at least two replicas"));
    }
    let (alpha, tau, gamma) = (params.alpha, params.tau, params.gamma);
    let branch = if tau > 2.0 { TailBranch::PowerAlpha } else { TailBranch::PowerGammaLog };
    let root = RngStream::new(seed).purpose(Purpose::LinkTail);
    let points: Vec<TailPoint> = distances
        .iter()
        .enumerate()
        .map(|(k, &d)| {
            let s = root.index(k as u64);
            let scale = (d as f64).powf(-alpha);
            let (mut m, mut m2) = (0.0, 0.0);
            for r in 0..reps as u64 {
                let w1 = pareto_quantile(s.uniform_at(2 * r), tau);
                let w2 = pareto_quantile(s.uniform_at(2 * r + 1), tau);
                let p = -(-w1 * w2 * scale).exp_m1();
                m += p;
                m2 += p * p;
            }
            let mean = m / reps as f64;
            let var = (m2 / reps as f64 - mean * mean).max(0.0);
            let df = d as f64;
            let shape = match branch {
                TailBranch::PowerAlpha => df.powf(-alpha),
                TailBranch::PowerGammaLog => df.powf(-gamma) * df.ln().powi(2),
            };
            TailPoint { d, estimate: mean, std_err: (var / reps as f64).sqrt(), shape, ratio: mean / shape }
        })
        .collect();
    let c = c.unwrap_or_else(|| points.iter().map(|p| p.ratio).fold(0.0, f64::max));
    let violations = points.iter().filter(|p| p.estimate - 3.0 * p.std_err > c * p.shape).map(|p| p.d).collect();
    let upper = &points[points.len() / 2..];
    let tail_slope = if upper.len() >= 2 {
        let xs: Vec<f64> = upper.iter().map(|p| (p.d as f64).ln()).collect();
        let ys: Vec<f64> = upper.iter().map(|p| p.ratio.ln()).collect();
        crate::experiment_harness::least_squares(&xs, &ys).slope
    } else {
        0.0
    };
    Ok(LinkTailReport { branch, points, c, violations, tail_slope })
}
