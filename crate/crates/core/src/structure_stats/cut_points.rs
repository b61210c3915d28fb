use crate::error::Result;
use crate::graph_model::{Graph, SfpGraph};
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct CutPointReport {
    pub n: usize,
    pub cut_points: Vec<u32>,
    /// Cut-points x whose neighbours x - 1 and x + 1 are cut-points too.
    pub good: Vec<u32>,
    pub cut_density: f64,
    pub good_density: f64,
}

/// Interior vertices x of the path order 0..n with no edge {a, b}, a < x < b.
pub fn cut_points_of(graph: &Graph) -> CutPointReport {
    let n = graph.n();
    let mut cut = vec![false; n];
    let mut reach = 0usize;
    for x in 0..n {
        if x > 0 && x + 1 < n && reach <= x {
            cut[x] = true;
        }
        if let Some(&m) = graph.neighbors(x).last() {
            reach = reach.max(m as usize);
        }
    }
    let cut_points: Vec<u32> = (0..n).filter(|&x| cut[x]).map(|x| x as u32).collect();
    let good: Vec<u32> = (1..n.saturating_sub(1))
        .filter(|&x| cut[x - 1] && cut[x] && cut[x + 1])
        .map(|x| x as u32)
        .collect();
    CutPointReport {
        n,
        cut_density: cut_points.len() as f64 / n as f64,
        good_density: good.len() as f64 / n as f64,
        cut_points,
        good,
    }
}

pub fn cut_points(g: &SfpGraph) -> Result<CutPointReport> {
    g.require_segment("cut-point analysis")?;
    Ok(cut_points_of(&g.graph))
}

#[cfg(test)]
mod tests {
    use super::*;

    // labels below are 0-based; vertex v here is v + 1 in 1-based numbering
    #[test]
    fn nearest_neighbour_segment() {
        let g = Graph::path(10).unwrap();
        let r = cut_points_of(&g);
        assert_eq!(r.cut_points, (1..=8).collect::<Vec<u32>>());
        assert_eq!(r.good, (2..=7).collect::<Vec<u32>>());
        assert_eq!(r.good.len(), 6);
    }

    #[test]
    fn long_edge_removes_cut_points() {
        let mut edges: Vec<(u32, u32)> = (0..9).map(|x| (x, x + 1)).collect();
        edges.push((1, 8));
        let r = cut_points_of(&Graph::from_edges(10, edges).unwrap());
        assert_eq!(r.cut_points, vec![1, 8]);
        assert!(r.good.is_empty());
    }
}
