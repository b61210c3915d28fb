use super::graph::{Graph, SfpGraph, Variant, WeightVector};
use super::params::{pareto_quantile, PhaseParams};
use super::topology::{Topology, TopologyKind};
use crate::error::{Error, Result};
use crate::rng::{Purpose, RngStream};
use crate::scalar::Real;
use rayon::prelude::*;

#[derive(Clone, Debug)]
pub struct GenerateOptions {
    /// Up to this many vertices every pair is visited; above it the sparse
    /// thinning sampler is used.
    pub scan_cap: usize,
    pub max_vertices: usize,
    pub max_edges: usize,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        GenerateOptions { scan_cap: 1 << 12, max_vertices: 1 << 26, max_edges: 1 << 28 }
    }
}

/// i.i.d. Pareto weights keyed by (seed, Weight, x).
pub fn sample_weights(n: usize, tau: f64, seed: u64) -> Result<WeightVector> {
    if !(tau > 1.0) {
        return Err(Error::param("tau", format!("must exceed 1, got {tau}")));
    }
    let s = RngStream::new(seed).purpose(Purpose::Weight);
    let w = (0..n).map(|x| pareto_quantile(s.index(x as u64).uniform(), tau)).collect();
    WeightVector::new(w)
}

/// 1 - exp(-w_x w_y / d^alpha).
pub fn link_probability<T: Real>(wx: T, wy: T, dist: usize, alpha: T) -> Result<T> {
    if dist == 0 {
        return Err(Error::Domain("link probability needs distance >= 1".into()));
    }
    if !(wx >= T::one() && wy >= T::one()) {
        return Err(Error::Domain(format!("weights must be >= 1, got {wx:?}, {wy:?}")));
    }
    let lam = wx * wy * T::from_count(dist).powf(-alpha);
    Ok(-(-lam).exp_m1())
}

#[inline]
fn bernoulli_edge(u: f64, lam: f64) -> bool {
    // 1 - e^{-lam} <= lam, so most pairs are settled without exp
    u < lam && u < -(-lam).exp_m1()
}

pub fn generate(params: &PhaseParams<f64>, topology: Topology, seed: u64) -> Result<SfpGraph> {
    generate_with(params, topology, seed, &GenerateOptions::default())
}

pub fn generate_long_range(alpha: f64, topology: Topology, seed: u64) -> Result<SfpGraph> {
    generate(&PhaseParams::long_range(alpha)?, topology, seed)
}

pub fn generate_with(
    params: &PhaseParams<f64>,
    topology: Topology,
    seed: u64,
    opts: &GenerateOptions,
) -> Result<SfpGraph> {
    let n = topology.n;
    if n > opts.max_vertices {
        return Err(Error::Resource(format!("N = {n} exceeds the vertex budget {}", opts.max_vertices)));
    }
    let weights = if params.is_long_range() {
        WeightVector::ones(n)
    } else {
        sample_weights(n, params.tau, seed)?
    };
    let edge = RngStream::new(seed).purpose(Purpose::Edge);
    let graph = if n <= opts.scan_cap {
        Graph::from_forward_lists(n, &scan_forward(&topology, params.alpha, weights.as_slice(), &edge))
    } else {
        let sparse = RngStream::new(seed).purpose(Purpose::SparseEdge);
        sparse_graph(&topology, params.alpha, weights.as_slice(), &sparse, opts.max_edges)?
    };
    let variant = if params.is_long_range() { Variant::LongRange } else { Variant::Standard };
    SfpGraph::new(topology, *params, weights, graph, seed, variant)
}

/// Whether the pair {x, y} is an edge, using the same uniform as the full scan.
pub fn pair_is_edge(topology: &Topology, alpha: f64, w: &[f64], seed: u64, x: usize, y: usize) -> bool {
    let d = topology.distance(x, y);
    if d == 1 {
        return true;
    }
    let edge = RngStream::new(seed).purpose(Purpose::Edge);
    let u = crate::rng::pair_uniform(&edge, x as u64, y as u64);
    bernoulli_edge(u, w[x] * w[y] * (d as f64).powf(-alpha))
}

fn scan_forward(topology: &Topology, alpha: f64, w: &[f64], edge: &RngStream) -> Vec<Vec<u32>> {
    let n = topology.n;
    let dpow: Vec<f64> = (0..=topology.max_distance())
        .map(|d| if d == 0 { 0.0 } else { (d as f64).powf(-alpha) })
        .collect();
    (0..n)
        .into_par_iter()
        .map(|x| {
            let sx = edge.index(x as u64);
            let wx = w[x];
            let mut out = Vec::new();
            for y in x + 1..n {
                let d = topology.distance(x, y);
                if d == 1 || bernoulli_edge(sx.index(y as u64).uniform(), wx * w[y] * dpow[d]) {
                    out.push(y as u32);
                }
            }
            out
        })
        .collect()
}

/// Exact sampler for large N. Vertices are grouped by dyadic weight class and
/// offsets by dyadic distance block; inside each (class, block) cell the
/// candidates are thinned with a geometric skip at the cell's largest
/// probability, then accepted with the ratio to the true probability.
fn sparse_graph(topology: &Topology, alpha: f64, w: &[f64], stream: &RngStream, max_edges: usize) -> Result<Graph> {
    let n = topology.n;
    let class_of = |v: f64| v.log2().floor().max(0.0) as usize;
    let n_classes = w.iter().map(|&v| class_of(v)).max().unwrap_or(0) + 1;
    let mut members: Vec<Vec<u32>> = vec![Vec::new(); n_classes];
    let mut class_max = vec![1.0f64; n_classes];
    for (x, &v) in w.iter().enumerate() {
        let c = class_of(v);
        members[c].push(x as u32);
        class_max[c] = class_max[c].max(v);
    }
    let classes: Vec<usize> = (0..n_classes).filter(|&c| !members[c].is_empty()).collect();
    let torus = topology.kind == TopologyKind::Torus;

    let lists: Vec<Vec<(u32, u32)>> = (0..n)
        .into_par_iter()
        .map(|x| {
            let sx = stream.index(x as u64);
            let mut counter = 0u64;
            let mut next = || {
                counter += 1;
                sx.uniform_at(counter)
            };
            let max_off = if torus { n / 2 } else { n - 1 - x };
            let mut out = Vec::new();
            let mut lo = 2usize;
            while lo <= max_off {
                let hi = (2 * lo - 1).min(max_off);
                let lo_pow = (lo as f64).powf(-alpha);
                for &c in &classes {
                    let pbar = -(-w[x] * class_max[c] * lo_pow).exp_m1();
                    if pbar <= 0.0 {
                        continue;
                    }
                    let pos = &members[c];
                    let (a, b) = cyclic_ranges(pos, x + lo, x + hi, n, torus);
                    let m = a.len() + b.len();
                    if m == 0 {
                        continue;
                    }
                    let ln_q = (-pbar).ln_1p();
                    let mut i = 0usize;
                    loop {
                        if pbar < 1.0 {
                            let skip = ((1.0 - next()).ln() / ln_q).floor();
                            if skip >= (m - i) as f64 {
                                break;
                            }
                            i += skip as usize;
                        }
                        if i >= m {
                            break;
                        }
                        let y = if i < a.len() { a[i] } else { b[i - a.len()] } as usize;
                        let off = if y >= x { y - x } else { y + n - x };
                        let p = -(-w[x] * w[y] * (off as f64).powf(-alpha)).exp_m1();
                        let duplicate = torus && 2 * off == n && x > y;
                        if next() * pbar < p && !duplicate {
                            out.push((x.min(y) as u32, x.max(y) as u32));
                        }
                        i += 1;
                    }
                }
                lo *= 2;
            }
            out
        })
        .collect();
    let total: usize = lists.iter().map(|l| l.len()).sum();
    if total > max_edges {
        return Err(Error::Resource(format!("sampled {total} long edges, budget is {max_edges}")));
    }
    Graph::from_edges(n, lists.into_iter().flatten().chain(topology.forced_edges()))
}

/// Slices of the sorted `pos` whose entries lie in the cyclic window
/// `[start, end]` (indices taken mod n on the torus).
fn cyclic_ranges(pos: &[u32], start: usize, end: usize, n: usize, torus: bool) -> (&[u32], &[u32]) {
    let slice = |s: usize, e: usize| {
        let i = pos.partition_point(|&p| (p as usize) < s);
        let j = pos.partition_point(|&p| (p as usize) <= e);
        &pos[i..j]
    };
    if !torus || end < n {
        let e = end.min(n - 1);
        if start > e {
            return (&[], &[]);
        }
        (slice(start, e), &[])
    } else if start >= n {
        (slice(start - n, end - n), &[])
    } else {
        (slice(start, n - 1), slice(0, end - n))
    }
}

/// Deterministic simplified model: {x, y} is an edge iff
/// W_x W_y >= N^alpha (ln N)^2. No nearest-neighbour edges.
pub fn generate_simplified(params: &PhaseParams<f64>, weights: WeightVector, seed: u64) -> Result<SfpGraph> {
    let n = weights.len();
    let topology = Topology::torus(n)?;
    let nf = n as f64;
    let threshold = nf.powf(params.alpha) * nf.ln().powi(2);
    let w = weights.as_slice();
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by(|&a, &b| w[b as usize].total_cmp(&w[a as usize]).then(a.cmp(&b)));
    let mut edges = Vec::new();
    for x in 0..n {
        let need = threshold / w[x];
        for &y in order.iter().take_while(|&&y| w[y as usize] >= need) {
            if (y as usize) > x {
                edges.push((x as u32, y));
            }
        }
    }
    let graph = Graph::from_edges(n, edges)?;
    SfpGraph::new(topology, *params, weights, graph, seed, Variant::Simplified)
}

/// Edges of the simplified graph missing from the standard one. Under the
/// shared-weight coupling this list should be empty with high probability.
pub fn simplified_violations(standard: &SfpGraph, simplified: &SfpGraph) -> Vec<(u32, u32)> {
    simplified.graph.edges().filter(|&(u, v)| !standard.graph.has_edge(u as usize, v as usize)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn link_probability_reference_value() {
        let p: f64 = link_probability(2.0, 3.0, 4, 2.0).unwrap();
        assert!((p - (1.0 - (-0.375f64).exp())).abs() < 1e-15);
        assert!((p - 0.312_710_721_209_579_8).abs() < 1e-12);
        let p32: f32 = link_probability(2.0, 3.0, 4, 2.0).unwrap();
        assert!((p32 - 0.312_710_7).abs() < 1e-6);
        assert!(link_probability(1.0f64, 1.0, 0, 2.0).is_err());
    }

    #[test]
    fn tiny_long_range_torus_has_forced_cycle() {
        let g = generate_long_range(2.0, Topology::torus(4).unwrap(), 3).unwrap();
        for (u, v) in [(0, 1), (1, 2), (2, 3), (0, 3)] {
            assert!(g.graph.has_edge(u, v));
        }
        assert!(g.weights.as_slice().iter().all(|&w| w == 1.0));
    }

    #[test]
    fn generation_is_deterministic() {
        let p = PhaseParams::new(1.5, 2.5).unwrap();
        let t = Topology::torus(300).unwrap();
        let a = generate(&p, t, 9).unwrap();
        let b = generate(&p, t, 9).unwrap();
        assert_eq!(a.graph, b.graph);
        let c = generate(&p, t, 10).unwrap();
        assert_ne!(a.graph, c.graph);
    }

    #[test]
    fn scan_agrees_with_pair_query() {
        let p = PhaseParams::new(1.2, 2.2).unwrap();
        let t = Topology::segment(60).unwrap();
        let g = generate(&p, t, 5).unwrap();
        for x in 0..60 {
            for y in x + 1..60 {
                assert_eq!(g.graph.has_edge(x, y), pair_is_edge(&t, 1.2, g.weights.as_slice(), 5, x, y));
            }
        }
    }

    #[test]
    fn sparse_sampler_produces_valid_graphs() {
        let p = PhaseParams::new(1.5, 2.5).unwrap();
        for t in [Topology::torus(501).unwrap(), Topology::torus(500).unwrap(), Topology::segment(400).unwrap()] {
            let opts = GenerateOptions { scan_cap: 10, ..Default::default() };
            let g = generate_with(&p, t, 2, &opts).unwrap();
            assert!(g.graph.edges().all(|(u, v)| t.distance(u as usize, v as usize) >= 1));
            assert!(g.graph.num_edges() >= t.forced_edges().count());
        }
    }

    #[test]
    fn cyclic_window_splits_at_wraparound() {
        let pos = [0u32, 2, 5, 8, 9];
        assert_eq!(cyclic_ranges(&pos, 8, 11, 10, true), (&pos[3..5], &pos[0..1]));
        assert_eq!(cyclic_ranges(&pos, 2, 5, 10, true), (&pos[1..3], &[][..]));
        assert_eq!(cyclic_ranges(&pos, 11, 12, 10, true), (&pos[1..2], &[][..]));
        assert_eq!(cyclic_ranges(&pos, 13, 14, 10, true), (&[][..], &[][..]));
    }

    #[test]
    fn simplified_threshold_rule() {
        let p = PhaseParams::new(0.6, 2.5).unwrap();
        let n = 50usize;
        let t = (n as f64).powf(0.6) * (n as f64).ln().powi(2);
        let mut w = vec![1.0; n];
        w[3] = t;
        w[7] = 2.0;
        let g = generate_simplified(&p, WeightVector::new(w).unwrap(), 0).unwrap();
        assert_eq!(g.graph.degree(3), n - 1);
        assert_eq!(g.graph.num_edges(), n - 1);
    }
}
