use super::chunking::{tilde_params, Chunking, TildeParams};
use crate::error::{Error, Result};
use crate::graph_model::{Graph, PhaseParams, SfpGraph, Topology, Variant, WeightVector};
use crate::rng::{Purpose, RngStream};
use serde::Serialize;

/// G collapsed onto its chunks: chunk i ~ chunk j when their max-weight
/// representatives are adjacent in G, plus the forced K-cycle.
#[derive(Clone, Debug)]
pub struct Collapsed {
    pub graph: Graph,
    pub reps: Vec<u32>,
    pub rep_weights: Vec<f64>,
}

pub fn collapse(g: &SfpGraph, chunking: &Chunking) -> Result<Collapsed> {
    g.require_torus("collapse")?;
    if chunking.n != g.n() {
        return Err(Error::Domain("chunking built for a different N".into()));
    }
    let k = chunking.count;
    let reps: Vec<u32> = (0..k).map(|j| g.weights.argmax(chunking.range(j)) as u32).collect();
    let rep_weights = reps.iter().map(|&r| g.weights.get(r as usize)).collect();
    let mut edges: Vec<(u32, u32)> = Topology::torus(k)?.forced_edges().collect();
    for i in 0..k {
        for j in i + 2..k {
            if g.graph.has_edge(reps[i] as usize, reps[j] as usize) {
                edges.push((i as u32, j as u32));
            }
        }
    }
    Ok(Collapsed { graph: Graph::from_edges(k, edges)?, reps, rep_weights })
}

#[derive(Clone, Debug, Serialize)]
pub struct CouplingAudit {
    /// Chunk pairs where the certified lower bound p^ fell below p~.
    pub condition_failures: Vec<(u32, u32)>,
    pub pairs_checked: usize,
    pub failure_fraction: f64,
    /// Edges of Gamma~ outside Gamma at pairs where the condition held.
    pub silent_violations: usize,
    /// Coupled weights pushed back into their bracket.
    pub weight_clamps: usize,
}

#[derive(Clone, Debug)]
pub struct CoupledTriple {
    pub g: SfpGraph,
    pub chunking: Chunking,
    pub collapsed: Collapsed,
    pub tilde: SfpGraph,
    pub tilde_params: TildeParams<f64>,
    pub audit: CouplingAudit,
}

/// Largest torus distance between a vertex of `a` and a vertex of `b`.
fn max_distance(n: usize, a: std::ops::Range<usize>, b: std::ops::Range<usize>) -> usize {
    let lo = (b.start + n - (a.end - 1)) % n;
    let span = (a.len() - 1) + (b.len() - 1);
    let half = n / 2;
    if (half + n - lo) % n <= span {
        return half;
    }
    let f = |d: usize| d.min(n - d);
    f(lo).max(f((lo + span) % n))
}

/// Couples (G, Gamma) with a scale-free percolation graph Gamma~ on the
/// K-torus with parameters (alpha~, tau). Chunk maxima are mapped to
/// Pareto(tau) weights by the quantile transform of the max-of-|S_j| law.
/// Where p^ >= p~, Gamma~ keeps a Gamma edge with probability p~/p_Gamma,
/// which gives Gamma~ its exact edge law and Gamma~ inside Gamma.
pub fn couple_tilde(g: &SfpGraph, chunking: &Chunking, eps: f64) -> Result<CoupledTriple> {
    let tp = tilde_params(&g.params, eps)?;
    let collapsed = collapse(g, chunking)?;
    let n = g.n();
    let k = chunking.count;
    let (alpha, tau) = (g.params.alpha, g.params.tau);
    let inv = 1.0 / (tau - 1.0);

    let mut clamps = 0usize;
    let wt: Vec<f64> = (0..k)
        .map(|j| {
            let w = collapsed.rep_weights[j];
            let size = chunking.size(j) as f64;
            // 1 - U = 1 - (1 - w^{-(tau-1)})^size
            let tail = -(size * (-w.powf(-(tau - 1.0))).ln_1p()).exp_m1();
            let raw = tail.powf(-inv);
            let lo = (size.powf(-inv) * w).max(1.0);
            let hi = size.ln().powf(2.0 * inv) * size.powf(-inv) * w;
            let c = raw.clamp(lo, hi.max(lo));
            if c != raw {
                clamps += 1;
            }
            c
        })
        .collect();

    let couple = RngStream::new(g.seed).purpose(Purpose::Couple);
    let mut edges: Vec<(u32, u32)> = Topology::torus(k)?.forced_edges().collect();
    let mut failures = Vec::new();
    let mut checked = 0usize;
    for i in 0..k {
        for j in i + 2..k {
            let kd = chunking.chunk_distance(i, j);
            if kd < 2 {
                continue;
            }
            checked += 1;
            let p_tilde = -(-wt[i] * wt[j] * (kd as f64).powf(-tp.alpha)).exp_m1();
            let wij = collapsed.rep_weights[i] * collapsed.rep_weights[j];
            let dmax = max_distance(n, chunking.range(i), chunking.range(j));
            let p_hat = -(-wij * (dmax as f64).powf(-alpha)).exp_m1();
            let (ri, rj) = (collapsed.reps[i] as usize, collapsed.reps[j] as usize);
            let p_gamma = -(-wij * (g.topology.distance(ri, rj) as f64).powf(-alpha)).exp_m1();
            let v = couple.index(i as u64).index(j as u64).uniform();
            let in_gamma = collapsed.graph.has_edge(i, j);
            let keep = if p_hat >= p_tilde {
                in_gamma && v * p_gamma < p_tilde
            } else {
                failures.push((i as u32, j as u32));
                v < p_tilde
            };
            if keep {
                edges.push((i as u32, j as u32));
            }
        }
    }
    let tilde_graph = Graph::from_edges(k, edges)?;
    let params = PhaseParams::new(tp.alpha, tau)?;
    let tilde = SfpGraph::new(Topology::torus(k)?, params, WeightVector::new(wt)?, tilde_graph, g.seed, Variant::Standard)?;
    let audit = CouplingAudit {
        failure_fraction: if checked == 0 { 0.0 } else { failures.len() as f64 / checked as f64 },
        condition_failures: failures,
        pairs_checked: checked,
        silent_violations: 0,
        weight_clamps: clamps,
    };
    let mut triple = CoupledTriple { g: g.clone(), chunking: *chunking, collapsed, tilde, tilde_params: tp, audit };
    triple.audit.silent_violations = silent_violations(&triple);
    Ok(triple)
}

/// Independent re-check of the containment Gamma~ in Gamma on the pairs where
/// the coupling condition held.
pub fn silent_violations(triple: &CoupledTriple) -> usize {
    let failed: std::collections::HashSet<(u32, u32)> = triple.audit.condition_failures.iter().copied().collect();
    triple
        .tilde
        .graph
        .edges()
        .filter(|e| !failed.contains(e))
        .filter(|&(i, j)| !triple.collapsed.graph.has_edge(i as usize, j as usize))
        .count()
}
