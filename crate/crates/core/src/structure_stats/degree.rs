use crate::error::{Error, Result};
use crate::graph_model::SfpGraph;
use serde::Serialize;

pub const HILL_MIN_K: usize = 50;

#[derive(Clone, Debug, Serialize)]
pub struct HillEstimate {
    /// Estimated tail exponent, P(X > t) ~ t^{-index}.
    pub index: f64,
    pub k: usize,
}

/// Hill estimator on the top k = ceil(q n) order statistics:
/// index = k / sum_{i<k} ln(X_(i) / X_(k)).
pub fn hill_estimate(values: &[f64], q: f64) -> Result<HillEstimate> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::param("q", format!("must lie in (0, 1), got {q}")));
    }
    let k = (q * values.len() as f64).ceil() as usize;
    if k < HILL_MIN_K || k >= values.len() {
        return Err(Error::InsufficientData(format!("Hill estimator needs {HILL_MIN_K} <= k < n, got k = {k}")));
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| b.total_cmp(a));
    let xk = v[k];
    if !(xk > 0.0) {
        return Err(Error::Domain("Hill estimator needs positive order statistics".into()));
    }
    let s: f64 = v[..k].iter().map(|x| (x / xk).ln()).sum();
    if s <= 0.0 {
        return Err(Error::Domain("top order statistics are all tied".into()));
    }
    Ok(HillEstimate { index: k as f64 / s, k })
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeBin {
    pub weight_lo: f64,
    pub weight_hi: f64,
    pub count: usize,
    pub mean_degree: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeSummary {
    pub n: usize,
    pub edges: usize,
    pub mean_degree: f64,
    pub max_degree: usize,
    pub hill: Option<HillEstimate>,
    /// Mean degree conditional on the weight, in dyadic weight bins.
    pub by_weight: Vec<DegreeBin>,
}

pub fn degree_summary(g: &SfpGraph, q: f64) -> Result<DegreeSummary> {
    let n = g.n();
    let deg: Vec<f64> = (0..n).map(|x| g.graph.degree(x) as f64).collect();
    let hill = hill_estimate(&deg, q).ok();
    let w = g.weights.as_slice();
    let mut bins: Vec<(usize, f64)> = Vec::new();
    for x in 0..n {
        let b = w[x].log2().floor() as usize;
        if bins.len() <= b {
            bins.resize(b + 1, (0, 0.0));
        }
        bins[b].0 += 1;
        bins[b].1 += deg[x];
    }
    let by_weight = bins
        .iter()
        .enumerate()
        .filter(|(_, b)| b.0 > 0)
        .map(|(i, b)| DegreeBin {
            weight_lo: 2f64.powi(i as i32),
            weight_hi: 2f64.powi(i as i32 + 1),
            count: b.0,
            mean_degree: b.1 / b.0 as f64,
        })
        .collect();
    Ok(DegreeSummary {
        n,
        edges: g.graph.num_edges(),
        mean_degree: 2.0 * g.graph.num_edges() as f64 / n as f64,
        max_degree: g.graph.max_degree(),
        hill,
        by_weight,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{Purpose, RngStream};

    #[test]
    fn hill_recovers_pareto_index() {
        let s = RngStream::new(5).purpose(Purpose::Audit);
        let x: Vec<f64> = (0..100_000).map(|i| (1.0 - s.uniform_at(i)).powf(-1.0 / 1.5)).collect();
        let h = hill_estimate(&x, 0.01).unwrap();
        assert!((h.index - 1.5).abs() < 0.15, "{}", h.index);
    }

    #[test]
    fn hill_needs_enough_data() {
        assert!(hill_estimate(&[1.0; 100], 0.1).is_err());
    }
}
