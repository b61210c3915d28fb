use super::{bfs_tree, Flow, FlowPath};
use crate::coarse_grain::CoupledTriple;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::walk_analysis::stationary;
use serde::Serialize;
use std::collections::HashMap;

#[derive(Clone, Debug, Serialize)]
pub struct TransferAudit {
    /// Largest chunk diameter used for the path bound.
    pub delta: usize,
    pub paths: usize,
    /// Paths whose route uses only representative edges.
    pub direct_paths: usize,
    /// Direct-route paths longer than 2 Delta + |q| (should be zero).
    pub length_violations: usize,
    /// Routes that needed a nearest-neighbour detour between adjacent chunks.
    pub detour_hops: usize,
    pub max_length: usize,
}

#[derive(Clone, Debug)]
pub struct TransferFlow<T> {
    pub flow: Flow<T>,
    pub audit: TransferAudit,
}

struct ChunkRouter {
    start: usize,
    size: usize,
    pred: Vec<u32>,
    dist: Vec<u32>,
}

impl ChunkRouter {
    fn new(g: &crate::graph_model::Graph, range: std::ops::Range<usize>) -> Result<Self> {
        let vertices: Vec<u32> = range.clone().map(|x| x as u32).collect();
        let local = g.induced(&vertices);
        local.require_connected()?;
        let m = vertices.len();
        let mut pred = vec![0u32; m * m];
        let mut dist = vec![0u32; m * m];
        for s in 0..m {
            bfs_tree(&local, s, &mut dist[s * m..(s + 1) * m], &mut pred[s * m..(s + 1) * m]);
        }
        Ok(ChunkRouter { start: range.start, size: m, pred, dist })
    }

    /// Canonical in-chunk geodesic from `a` to `b`, global labels, inclusive.
    fn path(&self, a: usize, b: usize, out: &mut Vec<u32>) {
        let (la, lb) = (a - self.start, b - self.start);
        let row = &self.pred[la * self.size..(la + 1) * self.size];
        let from = out.len();
        let mut v = lb;
        out.push((v + self.start) as u32);
        while v != la {
            v = row[v] as usize;
            out.push((v + self.start) as u32);
        }
        out[from..].reverse();
    }

    fn diameter(&self) -> usize {
        self.dist.iter().copied().max().unwrap_or(0) as usize
    }
}

/// Removes cycles in order of appearance so the walk becomes a simple path.
fn loop_erase(walk: &[u32]) -> Vec<u32> {
    let mut out: Vec<u32> = Vec::with_capacity(walk.len());
    let mut pos: HashMap<u32, usize> = HashMap::with_capacity(walk.len());
    for &v in walk {
        if let Some(&i) = pos.get(&v) {
            for u in out.drain(i + 1..) {
                pos.remove(&u);
            }
        } else {
            pos.insert(v, out.len());
            out.push(v);
        }
    }
    out
}

/// Lifts a flow on Gamma~ to G. A pair inside one chunk uses the in-chunk
/// geodesic. A pair (x, y) across chunks i != j follows, for every Gamma~
/// path q from i to j, the route x -> rep(i) -> ... -> rep(j) -> y with mass
/// f(q) pi_G(x) pi_G(y) / (pi~(i) pi~(j)). A Gamma~ edge whose
/// representatives are not adjacent in G is only allowed between
/// neighbouring chunks, where it is routed through the boundary edge.
pub fn chunk_transfer_flow<T: Scalar>(triple: &CoupledTriple, base: &Flow<T>) -> Result<TransferFlow<T>> {
    let g = &triple.g.graph;
    let c = &triple.chunking;
    let k = c.count;
    if base.n() != k {
        return Err(Error::Domain(format!("base flow lives on {} vertices, Gamma~ has {k}", base.n())));
    }
    base.check_feasible(T::from_real(1e-9))?;
    let reps = &triple.collapsed.reps;
    let routers: Vec<ChunkRouter> = (0..k).map(|j| ChunkRouter::new(g, c.range(j))).collect::<Result<_>>()?;
    let delta = routers.iter().map(|r| r.diameter()).max().unwrap_or(0);

    let mut bad = Vec::new();
    for (i, j) in triple.tilde.graph.edges() {
        let (i, j) = (i as usize, j as usize);
        if !g.has_edge(reps[i] as usize, reps[j] as usize) && c.chunk_distance(i, j) != 1 {
            bad.push((i, j));
        }
    }
    if !bad.is_empty() {
        let shown: Vec<_> = bad.iter().take(10).collect();
        let more = if bad.len() > 10 { format!(" and {} more", bad.len() - 10) } else { String::new() };
        return Err(Error::Infeasible(format!("{} Gamma~ edges without a G route: {shown:?}{more}", bad.len())));
    }

    let hop = |a: usize, b: usize, out: &mut Vec<u32>| -> bool {
        let (ra, rb) = (reps[a] as usize, reps[b] as usize);
        if g.has_edge(ra, rb) {
            out.push(rb as u32);
            return true;
        }
        let (u, v) = if (a + 1) % k == b {
            (c.range(a).end - 1, c.range(b).start)
        } else {
            (c.range(a).start, c.range(b).end - 1)
        };
        let mut tmp = Vec::new();
        routers[a].path(ra, u, &mut tmp);
        routers[b].path(v, rb, &mut tmp);
        out.extend_from_slice(&tmp[1..]);
        false
    };

    // routes between representatives, one per base path
    struct Route<T> {
        walk: Vec<u32>,
        mass: T,
        len: usize,
        direct: bool,
    }
    let mut routes: HashMap<(u32, u32), Vec<Route<T>>> = HashMap::new();
    let mut detours = 0usize;
    base.for_each_path(|q, m| {
        let (i, j) = (q[0], *q.last().unwrap());
        if i == j {
            return;
        }
        let mut walk = vec![reps[i as usize]];
        let mut direct = true;
        for w in q.windows(2) {
            if !hop(w[0] as usize, w[1] as usize, &mut walk) {
                direct = false;
                detours += 1;
            }
        }
        routes.entry((i, j)).or_default().push(Route { walk, mass: m.clone(), len: q.len() - 1, direct });
    });

    let pi_g = stationary::<T>(g)?;
    let pi_t = base.pi();
    let n = g.n();
    let mut paths = Vec::new();
    let mut audit = TransferAudit { delta, paths: 0, direct_paths: 0, length_violations: 0, detour_hops: detours, max_length: 0 };
    let mut buf = Vec::new();
    for x in 0..n {
        let i = c.chunk_of(x);
        for y in (0..n).filter(|&y| y != x) {
            let j = c.chunk_of(y);
            let demand = pi_g.get(x).clone() * pi_g.get(y).clone();
            if i == j {
                buf.clear();
                routers[i].path(x, y, &mut buf);
                audit.max_length = audit.max_length.max(buf.len() - 1);
                paths.push(FlowPath { vertices: buf.clone(), mass: demand });
                continue;
            }
            let scale = demand / (pi_t[i].clone() * pi_t[j].clone());
            for r in routes.get(&(i as u32, j as u32)).map(|v| v.as_slice()).unwrap_or(&[]) {
                buf.clear();
                routers[i].path(x, reps[i] as usize, &mut buf);
                buf.extend_from_slice(&r.walk[1..]);
                let tail_from = buf.len();
                routers[j].path(reps[j] as usize, y, &mut buf);
                buf.remove(tail_from);
                let p = loop_erase(&buf);
                let len = p.len() - 1;
                audit.max_length = audit.max_length.max(len);
                if r.direct {
                    audit.direct_paths += 1;
                    if len > 2 * delta + r.len {
                        audit.length_violations += 1;
                    }
                }
                paths.push(FlowPath { vertices: p, mass: r.mass.clone() * scale.clone() });
            }
        }
    }
    audit.paths = paths.len();
    let flow = Flow::from_paths(g, pi_g.as_slice().to_vec(), paths)?;
    Ok(TransferFlow { flow, audit })
}
