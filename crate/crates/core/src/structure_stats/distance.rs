use crate::error::{Error, Result};
use crate::graph_model::Graph;
use rayon::prelude::*;
use crate::coarse_grain::Chunking;
use serde::Serialize;
use std::collections::VecDeque;

pub fn bfs_distances(graph: &Graph, s: usize) -> Vec<u32> {
    let mut dist = vec![u32::MAX; graph.n()];
    let mut queue = VecDeque::new();
    dist[s] = 0;
    queue.push_back(s);
    while let Some(x) = queue.pop_front() {
        for &y in graph.neighbors(x) {
            if dist[y as usize] == u32::MAX {
                dist[y as usize] = dist[x] + 1;
                queue.push_back(y as usize);
            }
        }
    }
    dist
}

pub fn eccentricity(graph: &Graph, s: usize) -> Result<usize> {
    let d = bfs_distances(graph, s);
    if d.contains(&u32::MAX) {
        return Err(Error::Disconnected { components: graph.components().0 });
    }
    Ok(*d.iter().max().unwrap_or(&0) as usize)
}

/// Graph diameter by BFS from every vertex.
pub fn diameter(graph: &Graph) -> Result<usize> {
    graph.require_connected()?;
    Ok((0..graph.n()).into_par_iter().map(|s| eccentricity(graph, s).unwrap()).max().unwrap_or(0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ChunkDiameter {
    /// Largest finite distance inside the chunk (per component when split).
    pub diameter: usize,
    pub connected: bool,
}

/// Diameter of every chunk's induced subgraph. A disconnected chunk reports
/// its largest component diameter and `connected = false`.
pub fn chunk_diameters(graph: &Graph, chunking: &Chunking) -> Result<Vec<ChunkDiameter>> {
    if chunking.n != graph.n() {
        return Err(Error::Domain("chunking built for a different N".into()));
    }
    Ok((0..chunking.count)
        .into_par_iter()
        .map(|j| {
            let vertices: Vec<u32> = chunking.range(j).map(|x| x as u32).collect();
            let h = graph.induced(&vertices);
            let mut diameter = 0usize;
            let mut connected = true;
            for s in 0..h.n() {
                for &d in &bfs_distances(&h, s) {
                    if d == u32::MAX {
                        connected = false;
                    } else {
                        diameter = diameter.max(d as usize);
                    }
                }
            }
            ChunkDiameter { diameter, connected }
        })
        .collect())
}
