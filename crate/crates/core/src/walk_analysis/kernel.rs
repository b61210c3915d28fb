use crate::error::{Error, Result};
use crate::graph_model::Graph;
use crate::scalar::Scalar;
use serde::Serialize;
use std::marker::PhantomData;

/// Lazy simple random walk: P(x, x) = 1/2, P(x, y) = 1/(2 D_x) for y ~ x.
#[derive(Clone, Copy, Debug)]
pub struct LazyKernel<'g, T> {
    graph: &'g Graph,
    _scalar: PhantomData<T>,
}

impl<'g, T: Scalar> LazyKernel<'g, T> {
    pub fn new(graph: &'g Graph) -> Result<Self> {
        if let Some(x) = (0..graph.n()).find(|&x| graph.degree(x) == 0) {
            return Err(Error::Domain(format!("vertex {x} is isolated; the walk kernel is undefined")));
        }
        Ok(LazyKernel { graph, _scalar: PhantomData })
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn prob(&self, x: usize, y: usize) -> T {
        if x == y {
            T::half()
        } else if self.graph.has_edge(x, y) {
            T::one() / T::from_count(2 * self.graph.degree(x))
        } else {
            T::zero()
        }
    }

    /// `out = mu P`.
    pub fn step(&self, mu: &[T], out: &mut [T]) {
        let g = self.graph;
        let share: Vec<T> = (0..g.n()).map(|x| mu[x].clone() / T::from_count(2 * g.degree(x))).collect();
        for y in 0..g.n() {
            let mut acc = mu[y].clone() * T::half();
            for &x in g.neighbors(y) {
                acc = acc + share[x as usize].clone();
            }
            out[y] = acc;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StationaryMeasure<T> {
    pi: Vec<T>,
}

impl<T: Scalar> StationaryMeasure<T> {
    pub fn as_slice(&self) -> &[T] {
        &self.pi
    }

    pub fn get(&self, x: usize) -> &T {
        &self.pi[x]
    }

    pub fn min(&self) -> T {
        self.pi.iter().cloned().fold(None, |m: Option<T>, p| Some(m.map_or(p.clone(), |m| if p < m { p } else { m })))
            .unwrap_or_else(T::zero)
    }
}

/// pi(x) = D_x / D_G on a connected graph.
pub fn stationary<T: Scalar>(graph: &Graph) -> Result<StationaryMeasure<T>> {
    graph.require_connected()?;
    let total = graph.total_degree();
    Ok(StationaryMeasure { pi: (0..graph.n()).map(|x| T::ratio(graph.degree(x), total)).collect() })
}
