use super::kernel::{stationary, LazyKernel};
use super::{Method, MixingEstimate};
use crate::error::{Error, Result};
use crate::graph_model::Graph;
use crate::scalar::{compensated_sum, Scalar};
use std::time::Instant;

#[derive(Clone, Debug)]
pub struct ExactOptions {
    pub cap: usize,
    pub max_steps: usize,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions { cap: 4096, max_steps: 1 << 22 }
    }
}

/// Evolves every point mass P^n(x, .) and reports d(n) = max_x ||P^n(x,.) - pi||_TV.
struct Evolution<'g, T> {
    kernel: LazyKernel<'g, T>,
    pi: Vec<T>,
    rows: Vec<T>,
    scratch: Vec<T>,
    n: usize,
}

impl<'g, T: Scalar> Evolution<'g, T> {
    fn new(graph: &'g Graph, opts: &ExactOptions) -> Result<Self> {
        let n = graph.n();
        if n > opts.cap {
            return Err(Error::CapExceeded { what: "exact total-variation evolution", n, cap: opts.cap });
        }
        let pi = stationary::<T>(graph)?.as_slice().to_vec();
        let kernel = LazyKernel::new(graph)?;
        let mut rows = vec![T::zero(); n * n];
        for x in 0..n {
            rows[x * n + x] = T::one();
        }
        Ok(Evolution { kernel, pi, rows, scratch: vec![T::zero(); n], n })
    }

    fn distance(&self) -> T {
        let n = self.n;
        let mut worst = T::zero();
        for x in 0..n {
            let row = &self.rows[x * n..(x + 1) * n];
            let tv = compensated_sum(row.iter().zip(&self.pi).map(|(p, q)| (p.clone() - q.clone()).abs())) * T::half();
            if tv > worst {
                worst = tv;
            }
        }
        worst
    }

    fn advance(&mut self) {
        let n = self.n;
        for x in 0..n {
            self.kernel.step(&self.rows[x * n..(x + 1) * n], &mut self.scratch);
            self.rows[x * n..(x + 1) * n].clone_from_slice(&self.scratch);
        }
    }
}

/// d(0), d(1), ..., d(n_max).
pub fn tv_curve<T: Scalar>(graph: &Graph, n_max: usize) -> Result<Vec<T>> {
    tv_curve_with(graph, n_max, &ExactOptions::default())
}

pub fn tv_curve_with<T: Scalar>(graph: &Graph, n_max: usize, opts: &ExactOptions) -> Result<Vec<T>> {
    let mut ev = Evolution::<T>::new(graph, opts)?;
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(ev.distance());
    for _ in 0..n_max {
        ev.advance();
        out.push(ev.distance());
    }
    Ok(out)
}

/// Smallest n with d(n) < threshold, in any scalar type.
pub fn exact_tmix_in<T: Scalar>(graph: &Graph, threshold: T, opts: &ExactOptions) -> Result<u64> {
    if !(threshold > T::zero() && threshold < T::one()) {
        return Err(Error::param("threshold", format!("must lie in (0, 1), got {threshold:?}")));
    }
    let mut ev = Evolution::<T>::new(graph, opts)?;
    let mut d = ev.distance();
    let mut steps = 0usize;
    while d >= threshold {
        if steps >= opts.max_steps {
            return Err(Error::Convergence { what: "exact mixing time", iterations: steps, residual: f64::NAN });
        }
        ev.advance();
        steps += 1;
        d = ev.distance();
    }
    Ok(steps as u64)
}

pub fn exact_tmix(graph: &Graph, threshold: f64) -> Result<MixingEstimate> {
    exact_tmix_with(graph, threshold, &ExactOptions::default())
}

pub fn exact_tmix_with(graph: &Graph, threshold: f64, opts: &ExactOptions) -> Result<MixingEstimate> {
    let start = Instant::now();
    let t = exact_tmix_in::<f64>(graph, threshold, opts)?;
    Ok(MixingEstimate {
        value: t,
        method: Method::Exact,
        lower: t,
        upper: t,
        threshold,
        gap: None,
        resolved: true,
        runtime_s: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Exact;

    #[test]
    fn triangle_curve_is_exact() {
        let g = Graph::complete(3).unwrap();
        let d = tv_curve::<Exact>(&g, 3).unwrap();
        assert_eq!(d[0], Exact::ratio(2, 3));
        assert_eq!(d[1], Exact::ratio(1, 6));
        // the non-trivial eigenvalue of the lazy walk on K3 is 1/4
        assert_eq!(d[2], Exact::ratio(1, 24));
        assert_eq!(d[3], Exact::ratio(1, 96));
        assert_eq!(exact_tmix_in(&g, Exact::ratio(1, 4), &ExactOptions::default()).unwrap(), 1);
        assert_eq!(exact_tmix(&g, 0.25).unwrap().value, 1);
    }

    #[test]
    fn f32_and_f64_agree_with_rationals() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (1, 3)]).unwrap();
        let exact = tv_curve::<Exact>(&g, 12).unwrap();
        let d64 = tv_curve::<f64>(&g, 12).unwrap();
        let d32 = tv_curve::<f32>(&g, 12).unwrap();
        for i in 0..=12 {
            let e = crate::scalar::to_f64(&exact[i]);
            assert!((d64[i] - e).abs() < 1e-14);
            assert!((d32[i] as f64 - e).abs() < 1e-5);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let g = Graph::cycle(20).unwrap();
        let opts = ExactOptions { cap: 10, max_steps: 10 };
        assert!(matches!(tv_curve_with::<f64>(&g, 1, &opts), Err(Error::CapExceeded { .. })));
    }
}
