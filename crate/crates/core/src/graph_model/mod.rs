//! Graph construction: weights, link probabilities, the standard,
//! simplified and long-range models, and the text file format.

pub mod generate;
pub mod graph;
pub mod io;
pub mod params;
pub mod topology;

pub use generate::{
    generate, generate_long_range, generate_simplified, generate_with, link_probability, pair_is_edge,
    sample_weights, simplified_violations, GenerateOptions,
};
pub use graph::{Graph, SfpGraph, Variant, WeightVector};
pub use io::{deserialize, load, save, serialize};
pub use params::{pareto_quantile, PhaseParams};
pub use topology::{Topology, TopologyKind};
