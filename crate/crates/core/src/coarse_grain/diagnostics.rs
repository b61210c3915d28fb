use super::coupling::CoupledTriple;
use crate::error::Result;
use crate::structure_stats::chunk_diameters;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct Diagnostics {
    /// Largest diameter of a chunk's induced subgraph.
    pub delta: usize,
    pub chunk_diameters: Vec<usize>,
    /// Chunks whose induced subgraph is disconnected; their entry in
    /// `chunk_diameters` is the largest component diameter.
    pub disconnected_chunks: usize,
    pub edges_g: usize,
    pub edges_tilde: usize,
    /// |E(G)| / |E(Gamma~)|.
    pub edge_ratio: f64,
    /// max_j pi_G(S_j) / pi_Gamma~(j).
    pub mass_ratio: f64,
    /// max_j sum over z != w in S_j of pi(z) pi(w).
    pub pair_mass: f64,
}

pub fn diagnostics(triple: &CoupledTriple) -> Result<Diagnostics> {
    let g = &triple.g.graph;
    let c = &triple.chunking;
    let total_g = g.total_degree() as f64;
    let total_t = triple.tilde.graph.total_degree() as f64;
    let diam = chunk_diameters(g, c)?;
    let mut mass_ratio = 0.0f64;
    let mut pair_mass = 0.0f64;
    for j in 0..c.count {
        let p: Vec<f64> = c.range(j).map(|x| g.degree(x) as f64 / total_g).collect();
        let s: f64 = p.iter().sum();
        let s2: f64 = p.iter().map(|v| v * v).sum();
        pair_mass = pair_mass.max(s * s - s2);
        let pt = triple.tilde.graph.degree(j) as f64 / total_t;
        mass_ratio = mass_ratio.max(s / pt);
    }
    let edges_g = g.num_edges();
    let edges_tilde = triple.tilde.graph.num_edges();
    Ok(Diagnostics {
        delta: diam.iter().map(|d| d.diameter).max().unwrap_or(0),
        chunk_diameters: diam.iter().map(|d| d.diameter).collect(),
        disconnected_chunks: diam.iter().filter(|d| !d.connected).count(),
        edges_g,
        edges_tilde,
        edge_ratio: edges_g as f64 / edges_tilde as f64,
        mass_ratio,
        pair_mass,
    })
}

/// Delta |E(G)| (Pi + R^2 t_mix(Gamma~)^2 / |E(Gamma~)|), the coarse-grained
/// upper bound on t_mix(G).
pub fn assembled_bound(d: &Diagnostics, tmix_tilde: f64) -> f64 {
    d.delta as f64 * d.edges_g as f64 * (d.pair_mass + d.mass_ratio.powi(2) * tmix_tilde.powi(2) / d.edges_tilde as f64)
}
