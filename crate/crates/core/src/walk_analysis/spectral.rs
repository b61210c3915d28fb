//! Spectral gap of the lazy walk.
//!
//! Works with the symmetrised generator M = (I - D^{1/2} P D^{-1/2}), whose
//! eigenvalues are 1 - lambda_i. The gap is the second-smallest eigenvalue of
//! M. Small graphs are reduced to tridiagonal form by Householder
//! reflections; large ones go through Lanczos, deflated against the known
//! null vector sqrt(pi).

use super::kernel::stationary;
use super::{Method, MixingEstimate};
use crate::error::{Error, Result};
use crate::graph_model::Graph;
use crate::rng::{Purpose, RngStream};
use crate::scalar::Real;
use serde::Serialize;
use std::time::Instant;

#[derive(Clone, Debug)]
pub struct SpectralOptions {
    pub dense_cap: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions { dense_cap: 2048, tol: 1e-10, max_iter: 60_000, seed: 0x5eed }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectralMethod {
    Dense,
    Lanczos,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralGap<T> {
    pub lambda2: T,
    pub gap: T,
    pub method: SpectralMethod,
    pub residual: T,
    pub iterations: usize,
}

pub fn spectral_gap<T: Real>(graph: &Graph) -> Result<SpectralGap<T>> {
    spectral_gap_with(graph, &SpectralOptions::default())
}

pub fn spectral_gap_with<T: Real>(graph: &Graph, opts: &SpectralOptions) -> Result<SpectralGap<T>> {
    graph.require_connected()?;
    if graph.n() < 2 {
        return Err(Error::Domain("spectral gap needs at least two vertices".into()));
    }
    if graph.n() <= opts.dense_cap {
        dense_gap(graph)
    } else {
        lanczos_gap(graph, opts)
    }
}

fn inv_sqrt_degrees<T: Real>(graph: &Graph) -> Vec<T> {
    (0..graph.n()).map(|x| T::one() / T::from_count(graph.degree(x)).sqrt()).collect()
}

fn dense_gap<T: Real>(graph: &Graph) -> Result<SpectralGap<T>> {
    let n = graph.n();
    let s = inv_sqrt_degrees::<T>(graph);
    let half = T::c(0.5);
    let mut a = vec![T::zero(); n * n];
    for x in 0..n {
        a[x * n + x] = half;
        for &y in graph.neighbors(x) {
            a[x * n + y as usize] = -half * s[x] * s[y as usize];
        }
    }
    let (d, e) = householder_tridiagonal(&mut a, n);
    let mu2 = tridiagonal_eigenvalue(&d, &e, 1);
    Ok(SpectralGap { lambda2: T::one() - mu2, gap: mu2, method: SpectralMethod::Dense, residual: T::zero(), iterations: n })
}

/// Reduces the symmetric row-major matrix `a` to tridiagonal form. Returns
/// the diagonal and the sub-diagonal. `a` is overwritten.
pub fn householder_tridiagonal<T: Real>(a: &mut [T], n: usize) -> (Vec<T>, Vec<T>) {
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n.saturating_sub(1)];
    let mut v = vec![T::zero(); n];
    let mut w = vec![T::zero(); n];
    for k in 0..n.saturating_sub(1) {
        d[k] = a[k * n + k];
        let m = n - k - 1;
        let norm = (k + 1..n).fold(T::zero(), |s, i| s + a[i * n + k] * a[i * n + k]).sqrt();
        if norm == T::zero() {
            e[k] = T::zero();
            continue;
        }
        let x0 = a[(k + 1) * n + k];
        let alpha = if x0 > T::zero() { -norm } else { norm };
        for i in 0..m {
            v[i] = a[(k + 1 + i) * n + k];
        }
        v[0] = v[0] - alpha;
        let vn = (0..m).fold(T::zero(), |s, i| s + v[i] * v[i]).sqrt();
        e[k] = alpha;
        if vn == T::zero() {
            continue;
        }
        for vi in v.iter_mut().take(m) {
            *vi = *vi / vn;
        }
        // B <- B - 2 (v q^T + q v^T) with q = Bv - (v^T B v) v
        for i in 0..m {
            let row = &a[(k + 1 + i) * n + k + 1..(k + 1 + i) * n + n];
            w[i] = row.iter().zip(&v[..m]).fold(T::zero(), |s, (&b, &vj)| s + b * vj);
        }
        let c = (0..m).fold(T::zero(), |s, i| s + v[i] * w[i]);
        for i in 0..m {
            w[i] = w[i] - c * v[i];
        }
        let two = T::c(2.0);
        for i in 0..m {
            let (vi, wi) = (v[i], w[i]);
            let row = &mut a[(k + 1 + i) * n + k + 1..(k + 1 + i) * n + n];
            for j in 0..m {
                row[j] = row[j] - two * (vi * w[j] + wi * v[j]);
            }
        }
    }
    if n > 0 {
        d[n - 1] = a[(n - 1) * n + n - 1];
    }
    (d, e)
}

/// Number of eigenvalues of the tridiagonal (d, e) strictly below x.
fn sturm_count<T: Real>(d: &[T], e: &[T], x: T) -> usize {
    let tiny = T::min_positive_value().sqrt();
    let mut count = 0;
    let mut q = T::one();
    for i in 0..d.len() {
        let off = if i == 0 { T::zero() } else { e[i - 1] * e[i - 1] / q };
        q = d[i] - x - off;
        if q == T::zero() {
            q = -tiny;
        }
        if q < T::zero() {
            count += 1;
        }
    }
    count
}

/// The k-th smallest eigenvalue (0-based) of a symmetric tridiagonal matrix, by bisection.
pub fn tridiagonal_eigenvalue<T: Real>(d: &[T], e: &[T], k: usize) -> T {
    let n = d.len();
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for i in 0..n {
        let r = if i > 0 { Real::abs_f(e[i - 1]) } else { T::zero() }
            + if i + 1 < n { Real::abs_f(e[i]) } else { T::zero() };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    let span = hi - lo;
    lo = lo - span * T::epsilon() - T::min_positive_value();
    hi = hi + span * T::epsilon() + T::min_positive_value();
    for _ in 0..256 {
        let mid = lo + (hi - lo) * T::c(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(d, e, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo + (hi - lo) * T::c(0.5)
}

/// Eigenvector of the tridiagonal matrix for its smallest eigenvalue `theta`,
/// by two steps of shifted inverse iteration (the shifted matrix is
/// positive definite, so no pivoting is needed).
fn smallest_eigenvector<T: Real>(d: &[T], e: &[T], theta: T) -> Vec<T> {
    let n = d.len();
    let scale = d.iter().fold(T::zero(), |m, &x| m.max(Real::abs_f(x))).max(T::one());
    let shift = theta - scale * T::c(1e-13);
    let mut x = vec![T::one(); n];
    for _ in 0..3 {
        // LDL^T solve of (T - shift I) y = x
        let mut diag = vec![T::zero(); n];
        let mut l = vec![T::zero(); n];
        diag[0] = d[0] - shift;
        for i in 1..n {
            l[i] = e[i - 1] / diag[i - 1];
            diag[i] = d[i] - shift - l[i] * e[i - 1];
        }
        for i in 1..n {
            x[i] = x[i] - l[i] * x[i - 1];
        }
        for i in 0..n {
            x[i] = x[i] / diag[i];
        }
        for i in (0..n - 1).rev() {
            x[i] = x[i] - l[i + 1] * x[i + 1];
        }
        let norm = x.iter().fold(T::zero(), |s, &v| s + v * v).sqrt();
        for v in x.iter_mut() {
            *v = *v / norm;
        }
    }
    x
}

fn lanczos_gap<T: Real>(graph: &Graph, opts: &SpectralOptions) -> Result<SpectralGap<T>> {
    let n = graph.n();
    let s = inv_sqrt_degrees::<T>(graph);
    let half = T::c(0.5);
    let total = T::from_count(graph.total_degree());
    let null: Vec<T> = (0..n).map(|x| (T::from_count(graph.degree(x)) / total).sqrt()).collect();
    let apply = |x: &[T], out: &mut [T]| {
        for i in 0..n {
            let mut acc = T::zero();
            for &j in graph.neighbors(i) {
                acc = acc + x[j as usize] * s[j as usize];
            }
            out[i] = half * (x[i] - s[i] * acc);
        }
    };
    let deflate = |x: &mut [T]| {
        let c = x.iter().zip(&null).fold(T::zero(), |a, (&p, &q)| a + p * q);
        for (p, &q) in x.iter_mut().zip(&null) {
            *p = *p - c * q;
        }
    };
    let dot = |a: &[T], b: &[T]| a.iter().zip(b).fold(T::zero(), |s, (&p, &q)| s + p * q);

    let rs = RngStream::new(opts.seed).purpose(Purpose::Lanczos);
    let mut q: Vec<T> = (0..n).map(|i| T::c(rs.uniform_at(i as u64) - 0.5)).collect();
    deflate(&mut q);
    let nq = dot(&q, &q).sqrt();
    q.iter_mut().for_each(|v| *v = *v / nq);
    let mut q_prev = vec![T::zero(); n];
    let mut w = vec![T::zero(); n];
    let mut alphas: Vec<T> = Vec::new();
    let mut betas: Vec<T> = Vec::new();
    let tol = T::c(opts.tol);
    let mut beta_prev = T::zero();
    let mut last_residual = T::infinity();
    for j in 0..opts.max_iter {
        apply(&q, &mut w);
        for i in 0..n {
            w[i] = w[i] - beta_prev * q_prev[i];
        }
        let a = dot(&q, &w);
        for i in 0..n {
            w[i] = w[i] - a * q[i];
        }
        deflate(&mut w);
        let b = dot(&w, &w).sqrt();
        alphas.push(a);
        let breakdown = b <= T::epsilon() * T::c(1e3);
        let done_check = breakdown || (j >= 8 && j % 10 == 0) || j + 1 == opts.max_iter.min(n - 1);
        if done_check {
            let theta = tridiagonal_eigenvalue(&alphas, &betas, 0);
            let vec = smallest_eigenvector(&alphas, &betas, theta);
            let r = Real::abs_f(b * *vec.last().unwrap());
            let err = if alphas.len() > 1 {
                let theta2 = tridiagonal_eigenvalue(&alphas, &betas, 1);
                let sep = theta2 - theta;
                if sep > r { r.min(r * r / sep) } else { r }
            } else {
                r
            };
            last_residual = r;
            if breakdown || err <= tol * theta || j + 1 >= n - 1 {
                return Ok(SpectralGap {
                    lambda2: T::one() - theta,
                    gap: theta,
                    method: SpectralMethod::Lanczos,
                    residual: r,
                    iterations: j + 1,
                });
            }
        }
        betas.push(b);
        beta_prev = b;
        std::mem::swap(&mut q_prev, &mut q);
        for i in 0..n {
            q[i] = w[i] / b;
        }
    }
    Err(Error::Convergence {
        what: "Lanczos spectral gap",
        iterations: opts.max_iter,
        residual: last_residual.to_f64_lossy(),
    })
}

/// Relaxation-time bracket on t_mix(threshold):
/// (t_rel - 1) ln(1 / (2 eps)) <= t_mix <= t_rel ln(1 / (eps pi_min)).
pub fn spectral_bounds(gap: f64, pi_min: f64, threshold: f64) -> (f64, f64) {
    let t_rel = 1.0 / gap;
    ((t_rel - 1.0) * (1.0 / (2.0 * threshold)).ln(), t_rel * (1.0 / (threshold * pi_min)).ln())
}

/// Spectral proxy for t_mix: the relaxation time 1/gap, clamped into the
/// bracket above.
pub fn spectral_tmix(graph: &Graph, threshold: f64, opts: &SpectralOptions) -> Result<MixingEstimate> {
    let start = Instant::now();
    let g = spectral_gap_with::<f64>(graph, opts)?;
    let pi_min = stationary::<f64>(graph)?.min();
    let (lo, hi) = spectral_bounds(g.gap, pi_min, threshold);
    let lower = (lo - 1e-9).ceil().max(1.0) as u64;
    let upper = ((hi + 1e-9).floor() as u64).max(lower);
    let value = ((1.0 / g.gap).ceil() as u64).clamp(lower, upper);
    Ok(MixingEstimate {
        value,
        method: Method::Spectral,
        lower,
        upper,
        threshold,
        gap: Some(g.gap),
        resolved: true,
        runtime_s: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_gap_matches_closed_form() {
        // lazy walk on C_n: lambda_2 = (1 + cos(2 pi / n)) / 2
        for n in [5usize, 16, 33] {
            let g = Graph::cycle(n).unwrap();
            let gap = spectral_gap::<f64>(&g).unwrap();
            let expect = (1.0 - (2.0 * std::f64::consts::PI / n as f64).cos()) / 2.0;
            assert!((gap.gap - expect).abs() < 1e-12, "n = {n}");
            let g32 = spectral_gap::<f32>(&g).unwrap();
            assert!((g32.gap as f64 - expect).abs() < 1e-5);
        }
    }

    #[test]
    fn lanczos_matches_dense_on_cycle() {
        let g = Graph::cycle(400).unwrap();
        let dense = spectral_gap::<f64>(&g).unwrap();
        let opts = SpectralOptions { dense_cap: 10, ..Default::default() };
        let lz = spectral_gap_with::<f64>(&g, &opts).unwrap();
        assert_eq!(lz.method, SpectralMethod::Lanczos);
        assert!(((lz.gap - dense.gap) / dense.gap).abs() < 1e-6, "{} vs {}", lz.gap, dense.gap);
    }

    #[test]
    fn complete_graph_gap() {
        // lazy walk on K_n: lambda_2 = 1/2 - 1/(2(n-1))
        let g = Graph::complete(6).unwrap();
        let gap = spectral_gap::<f64>(&g).unwrap();
        assert!((gap.lambda2 - (0.5 - 0.1)).abs() < 1e-12);
    }

    #[test]
    fn tridiagonal_bisection() {
        // 1D Laplacian tridiag(-1, 2, -1) of size 5: 2 - 2 cos(k pi / 6)
        let d = vec![2.0f64; 5];
        let e = vec![-1.0f64; 4];
        for k in 0..5 {
            let expect = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / 6.0).cos();
            assert!((tridiagonal_eigenvalue(&d, &e, k) - expect).abs() < 1e-13);
        }
    }
}
