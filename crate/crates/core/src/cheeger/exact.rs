use super::vertex_set::VertexSet;
use crate::error::{Error, Result};
use crate::graph_model::Graph;
use crate::scalar::Scalar;

pub const EXACT_CHEEGER_CAP: usize = 20;

#[derive(Clone, Debug)]
pub struct CheegerResult<T> {
    pub phi: T,
    pub set: VertexSet,
    pub boundary: usize,
    pub volume: usize,
}

/// Phi* = min { Phi(S) : pi(S) <= 1/2 } by Gray-code enumeration of all
/// subsets. Ties go to the set with the smallest bitmask (bit x = vertex x).
pub fn exact_cheeger<T: Scalar>(graph: &Graph) -> Result<CheegerResult<T>> {
    let n = graph.n();
    if n > EXACT_CHEEGER_CAP {
        return Err(Error::CapExceeded { what: "exact Cheeger enumeration", n, cap: EXACT_CHEEGER_CAP });
    }
    graph.require_connected()?;
    if n < 2 {
        return Err(Error::Domain("Cheeger constant needs at least two vertices".into()));
    }
    let total = graph.total_degree() as u64;
    let deg: Vec<u64> = (0..n).map(|x| graph.degree(x) as u64).collect();
    let mut in_set = vec![false; n];
    let (mut vol, mut bnd) = (0u64, 0u64);
    let mut best: Option<(u64, u64, u64)> = None;
    for i in 1u64..(1 << n) {
        let v = i.trailing_zeros() as usize;
        let inside = graph.neighbors(v).iter().filter(|&&y| in_set[y as usize]).count() as u64;
        if in_set[v] {
            bnd = bnd + 2 * inside - deg[v];
            vol -= deg[v];
        } else {
            bnd = bnd + deg[v] - 2 * inside;
            vol += deg[v];
        }
        in_set[v] = !in_set[v];
        if vol == 0 || 2 * vol > total {
            continue;
        }
        let mask = i ^ (i >> 1);
        let better = match best {
            None => true,
            Some((b, w, m)) => {
                let lhs = bnd as u128 * w as u128;
                let rhs = b as u128 * vol as u128;
                lhs < rhs || (lhs == rhs && mask < m)
            }
        };
        if better {
            best = Some((bnd, vol, mask));
        }
    }
    let (b, w, mask) = best.ok_or_else(|| Error::Domain("no admissible set".into()))?;
    let set = VertexSet::from_members(graph, (0..n).filter(|&x| mask >> x & 1 == 1))?;
    Ok(CheegerResult { phi: T::ratio(b as usize, w as usize), set, boundary: b as usize, volume: w as usize })
}

/// ((1 - Phi)/(2 Phi)) ln 4 <= t_mix <= (2 / Phi^2) ln(4 / pi_min).
pub fn cheeger_bounds(phi: f64, pi_min: f64) -> (f64, f64) {
    ((1.0 - phi) / (2.0 * phi) * 4f64.ln(), 2.0 / (phi * phi) * (4.0 / pi_min).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Exact;

    #[test]
    fn four_cycle() {
        let g = Graph::cycle(4).unwrap();
        let r = exact_cheeger::<Exact>(&g).unwrap();
        assert_eq!(r.phi, Exact::ratio(1, 2));
        assert_eq!(r.set.members(), vec![0, 1]);
    }

    #[test]
    fn complete_graph() {
        // K4: best set has two vertices, boundary 4, volume 6
        let g = Graph::complete(4).unwrap();
        let r = exact_cheeger::<Exact>(&g).unwrap();
        assert_eq!(r.phi, Exact::ratio(2, 3));
    }

    #[test]
    fn cap_enforced() {
        let g = Graph::cycle(21).unwrap();
        assert!(matches!(exact_cheeger::<f64>(&g), Err(Error::CapExceeded { .. })));
    }
}
