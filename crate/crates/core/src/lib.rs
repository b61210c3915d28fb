//! Scale-free percolation on the one-dimensional torus and the mixing time
//! of the lazy random walk on it.

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cheeger;
pub mod coarse_grain;
pub mod concentration;
pub mod error;
pub mod experiment_harness;
pub mod flows;
pub mod graph_model;
pub mod rng;
pub mod scalar;
pub mod structure_stats;
pub mod walk_analysis;

pub use error::{Error, Result};
pub use graph_model::{Graph, PhaseParams, SfpGraph, Topology, TopologyKind, Variant, WeightVector};
pub use rng::RngStream;
pub use scalar::{Real, Scalar};

pub type Params = PhaseParams<f64>;
pub type Exact = num_rational::BigRational;
pub type Stationary = walk_analysis::StationaryMeasure<f64>;
pub type ExactStationary = walk_analysis::StationaryMeasure<Exact>;
pub type Gap = walk_analysis::SpectralGap<f64>;
pub type Cheeger = cheeger::CheegerResult<f64>;
pub type GeodesicFlow = flows::Flow<f64>;
pub type ExactFlow = flows::Flow<Exact>;
