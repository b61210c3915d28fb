use super::params::PhaseParams;
use super::topology::{Topology, TopologyKind};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

/// Undirected simple graph in compressed sparse row form. Neighbour lists are
/// sorted, so an oriented edge `(a, b)` has a stable index: the position of
/// `b` inside the block of `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Graph {
    /// Builds a graph from undirected edges. Duplicates are merged, self-loops
    /// and out-of-range endpoints are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::Domain(format!("self-loop at vertex {u}")));
            }
            if u as usize >= n || v as usize >= n {
                return Err(Error::Domain(format!("edge ({u}, {v}) out of range for N = {n}")));
            }
            pairs.push((u, v));
            pairs.push((v, u));
        }
        pairs.sort_unstable();
        pairs.dedup();
        Ok(Self::from_sorted_arcs(n, &pairs))
    }

    /// `forward[x]` holds the neighbours `y > x` of `x`, sorted.
    pub(crate) fn from_forward_lists(n: usize, forward: &[Vec<u32>]) -> Self {
        let mut deg = vec![0usize; n];
        for (x, list) in forward.iter().enumerate() {
            deg[x] += list.len();
            for &y in list {
                deg[y as usize] += 1;
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &deg {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut targets = vec![0u32; offsets[n]];
        // Visiting x in increasing order writes the backward neighbours of
        // every vertex in sorted order first, then its forward list.
        for x in 0..n {
            for &y in &forward[x] {
                let y = y as usize;
                targets[fill[y]] = x as u32;
                fill[y] += 1;
            }
            let start = fill[x];
            targets[start..start + forward[x].len()].copy_from_slice(&forward[x]);
            fill[x] += forward[x].len();
        }
        Graph { offsets, targets }
    }

    fn from_sorted_arcs(n: usize, arcs: &[(u32, u32)]) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for &(u, _) in arcs {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let targets = arcs.iter().map(|&(_, v)| v).collect();
        Graph { offsets, targets }
    }

    pub fn cycle(n: usize) -> Result<Self> {
        let t = Topology::torus(n)?;
        Self::from_edges(n, t.forced_edges())
    }

    pub fn path(n: usize) -> Result<Self> {
        let t = Topology::segment(n)?;
        Self::from_edges(n, t.forced_edges())
    }

    pub fn complete(n: usize) -> Result<Self> {
        let edges = (0..n as u32).flat_map(|u| (u + 1..n as u32).map(move |v| (u, v)));
        Self::from_edges(n, edges)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn neighbors(&self, x: usize) -> &[u32] {
        &self.targets[self.offsets[x]..self.offsets[x + 1]]
    }

    #[inline]
    pub fn degree(&self, x: usize) -> usize {
        self.offsets[x + 1] - self.offsets[x]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n()).map(|x| self.degree(x)).collect()
    }

    pub fn num_edges(&self) -> usize {
        self.targets.len() / 2
    }

    /// Number of oriented edges, which is also the total degree D_G.
    #[inline]
    pub fn num_arcs(&self) -> usize {
        self.targets.len()
    }

    pub fn total_degree(&self) -> usize {
        self.targets.len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n()).map(|x| self.degree(x)).max().unwrap_or(0)
    }

    #[inline]
    pub fn arc_offset(&self, x: usize) -> usize {
        self.offsets[x]
    }

    /// CSR index of the oriented edge `(a, b)`.
    #[inline]
    pub fn arc_index(&self, a: usize, b: usize) -> Option<usize> {
        let nb = self.neighbors(a);
        nb.binary_search(&(b as u32)).ok().map(|i| self.offsets[a] + i)
    }

    #[inline]
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.arc_index(a, b).is_some()
    }

    /// Arc target by CSR index.
    #[inline]
    pub fn arc_target(&self, idx: usize) -> u32 {
        self.targets[idx]
    }

    /// Undirected edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u).iter().filter(move |&&v| v as usize > u).map(move |&v| (u as u32, v))
        })
    }

    /// Connected component label of every vertex, labels in order of first vertex.
    pub fn components(&self) -> (usize, Vec<u32>) {
        let n = self.n();
        let mut label = vec![u32::MAX; n];
        let mut count = 0u32;
        let mut queue = VecDeque::new();
        for s in 0..n {
            if label[s] != u32::MAX {
                continue;
            }
            label[s] = count;
            queue.push_back(s);
            while let Some(x) = queue.pop_front() {
                for &y in self.neighbors(x) {
                    if label[y as usize] == u32::MAX {
                        label[y as usize] = count;
                        queue.push_back(y as usize);
                    }
                }
            }
            count += 1;
        }
        (count as usize, label)
    }

    pub fn is_connected(&self) -> bool {
        self.n() > 0 && self.components().0 == 1
    }

    pub fn require_connected(&self) -> Result<()> {
        let (c, _) = self.components();
        if c != 1 {
            return Err(Error::Disconnected { components: c });
        }
        Ok(())
    }

    /// Subgraph induced by `vertices`, relabelled `0..vertices.len()` in the given order.
    pub fn induced(&self, vertices: &[u32]) -> Graph {
        let mut local = std::collections::HashMap::with_capacity(vertices.len());
        for (i, &v) in vertices.iter().enumerate() {
            local.insert(v, i as u32);
        }
        let mut arcs = Vec::new();
        for (i, &v) in vertices.iter().enumerate() {
            for w in self.neighbors(v as usize) {
                if let Some(&j) = local.get(w) {
                    arcs.push((i as u32, j));
                }
            }
        }
        arcs.sort_unstable();
        Self::from_sorted_arcs(vertices.len(), &arcs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Standard,
    Simplified,
    LongRange,
}

impl Variant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Standard => "standard",
            Variant::Simplified => "simplified",
            Variant::LongRange => "longrange",
        }
    }

    pub fn has_forced_edges(&self) -> bool {
        !matches!(self, Variant::Simplified)
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Variant::Standard),
            "simplified" => Ok(Variant::Simplified),
            "longrange" => Ok(Variant::LongRange),
            _ => Err(Error::param("variant", format!("unknown variant `{s}`"))),
        }
    }
}

/// Vertex weights, all at least 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if let Some((x, v)) = w.iter().enumerate().find(|(_, v)| !(**v >= 1.0) || !v.is_finite()) {
            return Err(Error::Domain(format!("weight of vertex {x} is {v}, must be finite and >= 1")));
        }
        Ok(WeightVector(w))
    }

    pub fn ones(n: usize) -> Self {
        WeightVector(vec![1.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn get(&self, x: usize) -> f64 {
        self.0[x]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Vertex of largest weight in `range`, ties to the smallest index.
    pub fn argmax(&self, range: std::ops::Range<usize>) -> usize {
        let mut best = range.start;
        for x in range {
            if self.0[x] > self.0[best] {
                best = x;
            }
        }
        best
    }
}

/// A sampled scale-free percolation graph together with the data that
/// produced it.
#[derive(Clone, Debug)]
pub struct SfpGraph {
    pub topology: Topology,
    pub params: PhaseParams<f64>,
    pub weights: WeightVector,
    pub graph: Graph,
    pub seed: u64,
    pub variant: Variant,
}

impl SfpGraph {
    pub fn new(
        topology: Topology,
        params: PhaseParams<f64>,
        weights: WeightVector,
        graph: Graph,
        seed: u64,
        variant: Variant,
    ) -> Result<Self> {
        let n = topology.n;
        if weights.len() != n || graph.n() != n {
            return Err(Error::Domain(format!(
                "size mismatch: topology {n}, weights {}, graph {}",
                weights.len(),
                graph.n()
            )));
        }
        if variant.has_forced_edges() {
            if let Some((u, v)) = topology.forced_edges().find(|&(u, v)| !graph.has_edge(u as usize, v as usize)) {
                return Err(Error::Domain(format!("nearest-neighbour edge ({u}, {v}) missing")));
            }
        }
        if variant == Variant::Simplified && topology.kind != TopologyKind::Torus {
            return Err(Error::Topology("the simplified model lives on the torus".into()));
        }
        Ok(SfpGraph { topology, params, weights, graph, seed, variant })
    }

    pub fn n(&self) -> usize {
        self.topology.n
    }

    pub fn require_torus(&self, what: &str) -> Result<()> {
        if self.topology.kind != TopologyKind::Torus {
            return Err(Error::Topology(format!("{what} requires a torus graph")));
        }
        Ok(())
    }

    pub fn require_segment(&self, what: &str) -> Result<()> {
        if self.topology.kind != TopologyKind::Segment {
            return Err(Error::Topology(format!("{what} requires a segment graph")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csr_from_forward_lists_matches_edge_builder() {
        let forward = vec![vec![1, 3], vec![2], vec![3], vec![]];
        let a = Graph::from_forward_lists(4, &forward);
        let b = Graph::from_edges(4, [(0, 1), (0, 3), (1, 2), (2, 3)]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.neighbors(3), &[0, 2]);
        assert_eq!(a.num_edges(), 4);
        assert_eq!(a.arc_index(3, 2), Some(a.arc_offset(3) + 1));
    }

    #[test]
    fn components_and_induced() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (3, 4)]).unwrap();
        assert_eq!(g.components().0, 2);
        assert!(matches!(g.require_connected(), Err(Error::Disconnected { components: 2 })));
        let h = g.induced(&[2, 1, 0]);
        assert_eq!(h.neighbors(1), &[0, 2]);
        assert!(Graph::from_edges(3, [(1, 1)]).is_err());
    }

    #[test]
    fn forced_edges_are_checked() {
        let t = Topology::torus(4).unwrap();
        let p = PhaseParams::new(2.0, 2.5).unwrap();
        let g = Graph::path(4).unwrap();
        let r = SfpGraph::new(t, p, WeightVector::ones(4), g, 0, Variant::Standard);
        assert!(r.is_err());
    }
}
