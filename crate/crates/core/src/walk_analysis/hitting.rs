use super::kernel::{stationary, LazyKernel};
use crate::error::{Error, Result};
use crate::graph_model::Graph;
use crate::scalar::Scalar;

pub const HITTING_CAP: usize = 2048;

/// Dense Gauss-Jordan inverse with partial pivoting.
pub(crate) fn invert<T: Scalar>(mut a: Vec<T>, n: usize) -> Result<Vec<T>> {
    let mut inv = vec![T::zero(); n * n];
    for i in 0..n {
        inv[i * n + i] = T::one();
    }
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r * n + col].abs() > a[piv * n + col].abs() {
                piv = r;
            }
        }
        if a[piv * n + col].is_zero() {
            return Err(Error::Domain("singular matrix".into()));
        }
        if piv != col {
            for j in 0..n {
                a.swap(piv * n + j, col * n + j);
                inv.swap(piv * n + j, col * n + j);
            }
        }
        let p = a[col * n + col].clone();
        for j in 0..n {
            a[col * n + j] = a[col * n + j].clone() / p.clone();
            inv[col * n + j] = inv[col * n + j].clone() / p.clone();
        }
        for r in 0..n {
            if r == col || a[r * n + col].is_zero() {
                continue;
            }
            let f = a[r * n + col].clone();
            for j in 0..n {
                let t = a[col * n + j].clone() * f.clone();
                a[r * n + j] = a[r * n + j].clone() - t;
                let t = inv[col * n + j].clone() * f.clone();
                inv[r * n + j] = inv[r * n + j].clone() - t;
            }
        }
    }
    Ok(inv)
}

/// Row-major matrix of expected hitting times E_x[tau_y], computed from the
/// fundamental matrix Z = (I - P + 1 pi^T)^{-1}: E_x tau_y = (Z_yy - Z_xy) / pi_y.
pub fn hitting_times<T: Scalar>(graph: &Graph) -> Result<Vec<T>> {
    let n = graph.n();
    if n > HITTING_CAP {
        return Err(Error::CapExceeded { what: "hitting times", n, cap: HITTING_CAP });
    }
    let pi = stationary::<T>(graph)?;
    let k = LazyKernel::<T>::new(graph)?;
    let mut a = vec![T::zero(); n * n];
    for x in 0..n {
        for y in 0..n {
            let id = if x == y { T::one() } else { T::zero() };
            a[x * n + y] = id + pi.get(y).clone();
        }
        a[x * n + x] = a[x * n + x].clone() - T::half();
        for &y in graph.neighbors(x) {
            let y = y as usize;
            a[x * n + y] = a[x * n + y].clone() - k.prob(x, y);
        }
    }
    let z = invert(a, n)?;
    let mut h = vec![T::zero(); n * n];
    for x in 0..n {
        for y in 0..n {
            if x != y {
                h[x * n + y] = (z[y * n + y].clone() - z[x * n + y].clone()) / pi.get(y).clone();
            }
        }
    }
    Ok(h)
}

pub fn max_hitting_time<T: Scalar>(graph: &Graph) -> Result<T> {
    let h = hitting_times::<T>(graph)?;
    Ok(h.into_iter().fold(T::zero(), |m, v| if v > m { v } else { m }))
}

/// Upper bound t_mix <= 4 t_hit + 1 for the lazy walk.
pub fn hitting_tmix_bound<T: Scalar>(graph: &Graph) -> Result<T> {
    Ok(max_hitting_time::<T>(graph)? * T::from_count(4) + T::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Exact;
    use num_traits::{One, Zero};

    /// Independent route: for each target y solve h = 1 + P h on V \ {y}.
    fn by_restricted_solves(graph: &Graph) -> Vec<Exact> {
        let n = graph.n();
        let k = LazyKernel::<Exact>::new(graph).unwrap();
        let mut out = vec![Exact::zero(); n * n];
        for y in 0..n {
            let idx: Vec<usize> = (0..n).filter(|&v| v != y).collect();
            let m = idx.len();
            let mut a = vec![Exact::zero(); m * m];
            for (i, &x) in idx.iter().enumerate() {
                for (j, &z) in idx.iter().enumerate() {
                    let id = if i == j { Exact::one() } else { Exact::zero() };
                    a[i * m + j] = id - k.prob(x, z);
                }
            }
            let inv = invert(a, m).unwrap();
            for (i, &x) in idx.iter().enumerate() {
                out[x * n + y] = (0..m).map(|j| inv[i * m + j].clone()).sum();
            }
        }
        out
    }

    #[test]
    fn triangle_hitting_time_is_four() {
        let g = Graph::complete(3).unwrap();
        let h = hitting_times::<Exact>(&g).unwrap();
        assert_eq!(h[1], Exact::ratio(4, 1));
        assert_eq!(hitting_tmix_bound::<Exact>(&g).unwrap(), Exact::ratio(17, 1));
    }

    #[test]
    fn fundamental_matrix_agrees_with_restricted_solves() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5), (0, 3), (1, 4)]).unwrap();
        assert_eq!(hitting_times::<Exact>(&g).unwrap(), by_restricted_solves(&g));
        let f = hitting_times::<f64>(&g).unwrap();
        let e = by_restricted_solves(&g);
        for (a, b) in f.iter().zip(&e) {
            assert!((a - crate::scalar::to_f64(b)).abs() < 1e-10);
        }
    }
}
