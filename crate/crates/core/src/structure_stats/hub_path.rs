use crate::error::{Error, Result};
use crate::graph_model::SfpGraph;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct HubPath {
    pub i_max: usize,
    /// Hubs a_{i_max}, ..., a_1 = b_1, ..., b_{i_max} as global vertices.
    pub hubs: Vec<u32>,
    /// The full walk from the first to the last vertex of the block.
    pub path: Vec<u32>,
}

#[derive(Clone, Debug, Serialize)]
pub enum HubPathOutcome {
    Found(HubPath),
    /// A required hub-to-hub edge is absent.
    Missing { i_max: usize, edge: (u32, u32) },
}

/// Dyadic hub path across the block `start..start+len`: in positions
/// p = 1..L, A_i = [2^{-i-1} L, 2^{-i} L) and B_i = [L - 2^{-i} L, L - 2^{-i-1} L)
/// for i >= 2, A_1 = B_1 = [L/4, 3L/4), with hubs the heaviest vertex of each
/// block. The path walks along nearest-neighbour edges from position 1 to
/// a_{i_max}, jumps a_{i_max} -> ... -> a_1 = b_1 -> ... -> b_{i_max}, then
/// walks to position L.
pub fn dyadic_hub_path(g: &SfpGraph, start: usize, len: usize, m: f64) -> Result<HubPathOutcome> {
    if start + len > g.n() || len < 4 {
        return Err(Error::Domain(format!("block {start}..{} does not fit in N = {}", start + len, g.n())));
    }
    let l = len as f64;
    let ratio = l / l.ln().powf(m);
    if !(ratio >= 2.0) {
        return Err(Error::param("M", format!("log2(L / (ln L)^M) < 1 for L = {len}, M = {m}")));
    }
    let i_max = ratio.log2().floor() as usize;
    let pick = |lo: f64, hi: f64| -> Result<usize> {
        // positions p with lo <= p < hi, p in 1..=L, sit at offset p - 1
        let a = (lo.ceil() as usize).max(1);
        let b = ((hi.ceil() as usize).max(1) - 1).min(len);
        if a > b {
            return Err(Error::Domain(format!("empty dyadic block [{lo}, {hi}) for L = {len}")));
        }
        Ok(g.weights.argmax(start + a - 1..start + b))
    };
    let mut a_hubs = vec![pick(l / 4.0, 3.0 * l / 4.0)?];
    let mut b_hubs = vec![a_hubs[0]];
    for i in 2..=i_max {
        let s = 2f64.powi(-(i as i32));
        a_hubs.push(pick(s / 2.0 * l, s * l)?);
        b_hubs.push(pick(l - s * l, l - s / 2.0 * l)?);
    }
    let mut hubs: Vec<usize> = a_hubs.iter().rev().copied().collect();
    hubs.extend(b_hubs.iter().skip(1));
    for h in hubs.windows(2) {
        if !g.graph.has_edge(h[0], h[1]) {
            return Ok(HubPathOutcome::Missing { i_max, edge: (h[0] as u32, h[1] as u32) });
        }
    }
    let first = *hubs.first().unwrap();
    let last = *hubs.last().unwrap();
    let mut path: Vec<u32> = (start..=first).map(|x| x as u32).collect();
    path.extend(hubs[1..].iter().map(|&h| h as u32));
    path.extend((last + 1..start + len).map(|x| x as u32));
    Ok(HubPathOutcome::Found(HubPath { i_max, hubs: hubs.iter().map(|&h| h as u32).collect(), path }))
}
