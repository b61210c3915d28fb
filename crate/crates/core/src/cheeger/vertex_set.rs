use crate::error::{Error, Result};
use crate::graph_model::Graph;
use crate::scalar::Scalar;
use serde::Serialize;

/// A vertex subset with its volume D_S and edge boundary D_{S,S^c} cached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexSet {
    bits: Vec<u64>,
    n: usize,
    size: usize,
    volume: usize,
    boundary: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SetSummary {
    pub size: usize,
    pub volume: usize,
    pub boundary: usize,
    pub members: Vec<usize>,
}

impl VertexSet {
    pub fn from_members<I: IntoIterator<Item = usize>>(graph: &Graph, members: I) -> Result<Self> {
        let n = graph.n();
        let mut bits = vec![0u64; n.div_ceil(64)];
        for x in members {
            if x >= n {
                return Err(Error::Domain(format!("vertex {x} out of range for N = {n}")));
            }
            bits[x / 64] |= 1 << (x % 64);
        }
        Ok(Self::from_bits(graph, bits))
    }

    pub fn from_predicate<F: Fn(usize) -> bool>(graph: &Graph, f: F) -> Self {
        let n = graph.n();
        let mut bits = vec![0u64; n.div_ceil(64)];
        for x in (0..n).filter(|&x| f(x)) {
            bits[x / 64] |= 1 << (x % 64);
        }
        Self::from_bits(graph, bits)
    }

    fn from_bits(graph: &Graph, bits: Vec<u64>) -> Self {
        let n = graph.n();
        let has = |x: usize| bits[x / 64] >> (x % 64) & 1 == 1;
        let mut size = 0;
        let mut volume = 0;
        let mut boundary = 0;
        for x in (0..n).filter(|&x| has(x)) {
            size += 1;
            volume += graph.degree(x);
            boundary += graph.neighbors(x).iter().filter(|&&y| !has(y as usize)).count();
        }
        VertexSet { bits, n, size, volume, boundary }
    }

    #[inline]
    pub fn contains(&self, x: usize) -> bool {
        x < self.n && self.bits[x / 64] >> (x % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    /// D_S, the sum of degrees in S.
    pub fn volume(&self) -> usize {
        self.volume
    }

    /// D_{S,S^c}, the number of edges leaving S.
    pub fn boundary(&self) -> usize {
        self.boundary
    }

    pub fn members(&self) -> Vec<usize> {
        (0..self.n).filter(|&x| self.contains(x)).collect()
    }

    pub fn complement(&self, graph: &Graph) -> Self {
        let mut bits: Vec<u64> = self.bits.iter().map(|b| !b).collect();
        if !self.n.is_multiple_of(64) {
            if let Some(last) = bits.last_mut() {
                *last &= (1u64 << (self.n % 64)) - 1;
            }
        }
        Self::from_bits(graph, bits)
    }

    /// pi(S) = D_S / D_G.
    pub fn mass<T: Scalar>(&self, graph: &Graph) -> T {
        T::ratio(self.volume, graph.total_degree())
    }

    pub fn summary(&self) -> SetSummary {
        SetSummary { size: self.size, volume: self.volume, boundary: self.boundary, members: self.members() }
    }
}

/// Phi(S) = D_{S,S^c} / D_S.
pub fn bottleneck_ratio<T: Scalar>(graph: &Graph, set: &VertexSet) -> Result<T> {
    if set.is_empty() || set.len() == graph.n() {
        return Err(Error::Domain("bottleneck ratio needs a non-empty proper subset".into()));
    }
    if set.volume() == 0 {
        return Err(Error::Domain("bottleneck ratio undefined: the set has zero volume".into()));
    }
    Ok(T::ratio(set.boundary(), set.volume()))
}

/// Half of the torus, {1, ..., floor(N/2)}.
pub fn half_torus_set(graph: &Graph) -> VertexSet {
    let half = graph.n() / 2;
    VertexSet::from_predicate(graph, |x| x >= 1 && x <= half)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Exact;

    #[test]
    fn volume_and_boundary() {
        let g = Graph::cycle(6).unwrap();
        let s = VertexSet::from_members(&g, [0, 1, 2]).unwrap();
        assert_eq!((s.volume(), s.boundary()), (6, 2));
        assert_eq!(bottleneck_ratio::<Exact>(&g, &s).unwrap(), Exact::ratio(1, 3));
        let c = s.complement(&g);
        assert_eq!(c.members(), vec![3, 4, 5]);
        assert_eq!(c.boundary(), 2);
        assert!(bottleneck_ratio::<f64>(&g, &VertexSet::from_members(&g, []).unwrap()).is_err());
    }

    #[test]
    fn half_torus() {
        let g = Graph::cycle(9).unwrap();
        assert_eq!(half_torus_set(&g).members(), vec![1, 2, 3, 4]);
    }
}
