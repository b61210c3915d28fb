//! Multicommodity flows routing pi(x) pi(y) between every ordered pair,
//! their edge loads and congestion.

pub mod transfer;

pub use transfer::{chunk_transfer_flow, TransferAudit, TransferFlow};

use crate::error::{Error, Result};
use crate::graph_model::Graph;
use crate::scalar::Scalar;
use crate::walk_analysis::stationary;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{HashMap, VecDeque};

pub const GEODESIC_CAP: usize = 1 << 13;

#[derive(Clone, Debug)]
pub struct FlowPath<T> {
    pub vertices: Vec<u32>,
    pub mass: T,
}

#[derive(Clone, Debug)]
enum PathStore<T> {
    /// `pred[s * n + v]`: predecessor of v on the canonical geodesic from s.
    Geodesic { pred: Vec<u32> },
    Explicit { paths: Vec<FlowPath<T>> },
}

#[derive(Clone, Debug)]
pub struct Flow<T> {
    n: usize,
    pi: Vec<T>,
    store: PathStore<T>,
}

impl<T: Scalar> Flow<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pi(&self) -> &[T] {
        &self.pi
    }

    /// A flow given by explicit paths; each path must be a walk in `graph`.
    pub fn from_paths(graph: &Graph, pi: Vec<T>, paths: Vec<FlowPath<T>>) -> Result<Self> {
        for p in &paths {
            if p.vertices.is_empty() {
                return Err(Error::Infeasible("empty path".into()));
            }
            if let Some(w) = p.vertices.windows(2).find(|w| !graph.has_edge(w[0] as usize, w[1] as usize)) {
                return Err(Error::Infeasible(format!("path uses non-edge ({}, {})", w[0], w[1])));
            }
        }
        Ok(Flow { n: graph.n(), pi, store: PathStore::Explicit { paths } })
    }

    /// Streams every path with its mass. Geodesic paths are rebuilt on the fly.
    pub fn for_each_path<F: FnMut(&[u32], &T)>(&self, mut f: F) {
        match &self.store {
            PathStore::Explicit { paths } => paths.iter().for_each(|p| f(&p.vertices, &p.mass)),
            PathStore::Geodesic { pred } => {
                let n = self.n;
                let mut buf = Vec::new();
                for s in 0..n {
                    let row = &pred[s * n..(s + 1) * n];
                    for t in (0..n).filter(|&t| t != s) {
                        buf.clear();
                        let mut v = t as u32;
                        buf.push(v);
                        while v as usize != s {
                            v = row[v as usize];
                            buf.push(v);
                        }
                        buf.reverse();
                        f(&buf, &(self.pi[s].clone() * self.pi[t].clone()));
                    }
                }
            }
        }
    }

    /// max over ordered pairs x != y of |sum of path masses - pi(x) pi(y)|.
    pub fn feasibility_residual(&self) -> T {
        let mut total: HashMap<(u32, u32), T> = HashMap::new();
        self.for_each_path(|p, m| {
            let key = (p[0], *p.last().unwrap());
            if key.0 != key.1 {
                let e = total.entry(key).or_insert_with(T::zero);
                *e = e.clone() + m.clone();
            }
        });
        let mut worst = T::zero();
        for x in 0..self.n {
            for y in (0..self.n).filter(|&y| y != x) {
                let want = self.pi[x].clone() * self.pi[y].clone();
                let got = total.get(&(x as u32, y as u32)).cloned().unwrap_or_else(T::zero);
                let d = (got - want).abs();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    pub fn check_feasible(&self, tol: T) -> Result<()> {
        let r = self.feasibility_residual();
        if r > tol {
            return Err(Error::Infeasible(format!("demand mismatch {r:?}")));
        }
        Ok(())
    }
}

/// BFS distances from `s` and the canonical predecessor of each vertex: the
/// smallest-index neighbour one layer closer to `s`.
pub(crate) fn bfs_tree(graph: &Graph, s: usize, dist: &mut [u32], pred: &mut [u32]) {
    dist.iter_mut().for_each(|d| *d = u32::MAX);
    let mut queue = VecDeque::with_capacity(graph.n());
    dist[s] = 0;
    pred[s] = s as u32;
    queue.push_back(s);
    while let Some(x) = queue.pop_front() {
        for &y in graph.neighbors(x) {
            let y = y as usize;
            if dist[y] == u32::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    for v in (0..graph.n()).filter(|&v| v != s && dist[v] != u32::MAX) {
        pred[v] = *graph.neighbors(v).iter().find(|&&u| dist[u as usize] + 1 == dist[v]).unwrap();
    }
}

/// Shortest-path flow: pi(x) pi(y) on the canonical geodesic from x to y.
pub fn geodesic_flow<T: Scalar>(graph: &Graph) -> Result<Flow<T>> {
    let n = graph.n();
    if n > GEODESIC_CAP {
        return Err(Error::CapExceeded { what: "geodesic flow", n, cap: GEODESIC_CAP });
    }
    let pi = stationary::<T>(graph)?.as_slice().to_vec();
    let rows: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map(|s| {
            let mut dist = vec![0u32; n];
            let mut pred = vec![0u32; n];
            bfs_tree(graph, s, &mut dist, &mut pred);
            pred
        })
        .collect();
    Ok(Flow { n, pi, store: PathStore::Geodesic { pred: rows.concat() } })
}

/// Loads f(e) = sum over paths through e of f(p)|p|, indexed by CSR arc.
pub fn edge_loads<T: Scalar>(graph: &Graph, flow: &Flow<T>) -> Result<Vec<T>> {
    if flow.n != graph.n() {
        return Err(Error::Domain("flow and graph sizes differ".into()));
    }
    let mut load = vec![T::zero(); graph.num_arcs()];
    if let PathStore::Geodesic { pred } = &flow.store {
        // A path from s ends in the subtree of every tree arc it uses, so the
        // load of (pred v, v) is the depth-weighted demand of v's subtree.
        let n = flow.n;
        let mut dist = vec![0u32; n];
        let mut scratch = vec![0u32; n];
        let mut acc = vec![T::zero(); n];
        for s in 0..n {
            let row = &pred[s * n..(s + 1) * n];
            bfs_tree(graph, s, &mut dist, &mut scratch);
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by_key(|&v| std::cmp::Reverse(dist[v]));
            for &v in &order {
                acc[v] = flow.pi[s].clone() * flow.pi[v].clone() * T::from_count(dist[v] as usize);
            }
            for &v in &order {
                if v == s {
                    continue;
                }
                let u = row[v] as usize;
                let a = graph.arc_index(u, v).expect("tree arc");
                load[a] = load[a].clone() + acc[v].clone();
                acc[u] = acc[u].clone() + acc[v].clone();
            }
        }
        return Ok(load);
    }
    let mut err = None;
    flow.for_each_path(|p, m| {
        let len = T::from_count(p.len() - 1);
        for w in p.windows(2) {
            match graph.arc_index(w[0] as usize, w[1] as usize) {
                Some(a) => load[a] = load[a].clone() + m.clone() * len.clone(),
                None => err = Some(Error::Infeasible(format!("path uses non-edge ({}, {})", w[0], w[1]))),
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(load),
    }
}

pub fn edge_load<T: Scalar>(graph: &Graph, flow: &Flow<T>, a: usize, b: usize) -> Result<T> {
    let idx = graph.arc_index(a, b).ok_or_else(|| Error::Domain(format!("({a}, {b}) is not an edge")))?;
    Ok(edge_loads(graph, flow)?.swap_remove(idx))
}

#[derive(Clone, Debug, Serialize)]
pub struct Congestion<T> {
    pub rho: T,
    pub arc: (u32, u32),
}

/// rho(f) = max over arcs (a, b) of f(a, b) / (pi(a) P(a, b)).
pub fn congestion<T: Scalar>(graph: &Graph, flow: &Flow<T>) -> Result<Congestion<T>> {
    let load = edge_loads(graph, flow)?;
    let mut best: Option<(T, (u32, u32))> = None;
    for a in 0..graph.n() {
        // pi(a) P(a, b) = (D_a / D_G) / (2 D_a)
        let q = flow.pi[a].clone() / T::from_count(2 * graph.degree(a));
        for (i, &b) in graph.neighbors(a).iter().enumerate() {
            let r = load[graph.arc_offset(a) + i].clone() / q.clone();
            if best.as_ref().is_none_or(|(m, _)| r > *m) {
                best = Some((r, (a as u32, b)));
            }
        }
    }
    let (rho, arc) = best.ok_or_else(|| Error::Domain("graph has no edges".into()))?;
    Ok(Congestion { rho, arc })
}

/// t_mix <= rho ln(4 |oriented edges|).
pub fn flow_tmix_bound(rho: f64, graph: &Graph) -> f64 {
    rho * (4.0 * graph.num_arcs() as f64).ln()
}

/// The classical 32 t_mix^2 scale, reported for reference only.
pub fn sinclair_reference(tmix: f64) -> f64 {
    32.0 * tmix * tmix
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Exact;

    #[test]
    fn four_cycle_geodesic_loads() {
        let g = Graph::cycle(4).unwrap();
        let f = geodesic_flow::<Exact>(&g).unwrap();
        assert_eq!(f.feasibility_residual(), Exact::ratio(0, 1));
        // 0 -> 2 goes through 1 (smallest predecessor of 2 is 1)
        let mut seen = false;
        f.for_each_path(|p, m| {
            if p[0] == 0 && *p.last().unwrap() == 2 {
                assert_eq!(p, &[0, 1, 2]);
                assert_eq!(*m, Exact::ratio(1, 16));
                seen = true;
            }
        });
        assert!(seen);
    }

    #[test]
    fn tree_loads_match_path_loads() {
        let g = Graph::from_edges(7, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (0, 6), (0, 3), (2, 5)]).unwrap();
        let f = geodesic_flow::<Exact>(&g).unwrap();
        let mut paths = Vec::new();
        f.for_each_path(|p, m| paths.push(FlowPath { vertices: p.to_vec(), mass: m.clone() }));
        let e = Flow::from_paths(&g, f.pi().to_vec(), paths).unwrap();
        assert_eq!(edge_loads(&g, &f).unwrap(), edge_loads(&g, &e).unwrap());
    }

    #[test]
    fn triangle_congestion() {
        // each arc carries one direct path of mass 1/9, pi(a) P(a, b) = 1/12
        let g = Graph::complete(3).unwrap();
        let f = geodesic_flow::<Exact>(&g).unwrap();
        assert_eq!(congestion(&g, &f).unwrap().rho, Exact::ratio(12, 9));
    }

    #[test]
    fn non_edge_load_is_an_error() {
        let g = Graph::cycle(5).unwrap();
        let f = geodesic_flow::<f64>(&g).unwrap();
        assert!(edge_load(&g, &f, 0, 2).is_err());
    }
}
