use crate::error::{Error, Result};
use crate::graph_model::PhaseParams;
use crate::scalar::Real;
use serde::Serialize;
use std::ops::Range;

/// Partition of the torus into K consecutive chunks of length L; the last
/// chunk also takes the remainder N mod L.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Chunking {
    pub n: usize,
    pub len: usize,
    pub remainder: usize,
    pub count: usize,
}

impl Chunking {
    pub fn new(n: usize, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::param("L", "chunk length must be positive"));
        }
        let remainder = n % len;
        let count = (n - remainder) / len;
        if count < 3 {
            return Err(Error::param("L", format!("N = {n}, L = {len} gives K = {count} < 3 chunks")));
        }
        Ok(Chunking { n, len, remainder, count })
    }

    #[inline]
    pub fn chunk_of(&self, x: usize) -> usize {
        (x / self.len).min(self.count - 1)
    }

    pub fn range(&self, j: usize) -> Range<usize> {
        let end = if j + 1 == self.count { self.n } else { (j + 1) * self.len };
        j * self.len..end
    }

    pub fn size(&self, j: usize) -> usize {
        self.range(j).len()
    }

    /// Cyclic distance between chunk indices.
    pub fn chunk_distance(&self, i: usize, j: usize) -> usize {
        let d = i.abs_diff(j);
        d.min(self.count - d)
    }
}

/// L = floor(N^{gamma - 1 + eps}).
pub fn make_chunking(n: usize, params: &PhaseParams<f64>, eps: f64) -> Result<Chunking> {
    let p = params.with_eps(eps)?;
    let len = (n as f64).powf(p.gamma - 1.0 + eps).floor() as usize;
    Chunking::new(n, len)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TildeParams<T> {
    pub alpha: T,
    pub tau: T,
    pub gamma: T,
}

/// alpha~ = (2 - gamma - 1.5 eps) / ((tau - 1)(2 - gamma - eps)), tau~ = tau.
pub fn tilde_params<T: Real>(params: &PhaseParams<T>, eps: T) -> Result<TildeParams<T>> {
    let p = params.with_eps(eps)?;
    let two = T::c(2.0);
    let alpha = (two - p.gamma - T::c(1.5) * eps) / ((p.tau - T::one()) * (two - p.gamma - eps));
    Ok(TildeParams { alpha, tau: p.tau, gamma: alpha * (p.tau - T::one()) })
}
