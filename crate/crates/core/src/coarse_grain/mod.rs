//! Renormalisation of a phase-(ii) graph: chunking, the collapsed graph
//! Gamma, the coupled graph Gamma~ and the diagnostics that transfer mixing
//! bounds from Gamma~ back to G.

pub mod chunking;
pub mod coupling;
pub mod diagnostics;

pub use chunking::{make_chunking, tilde_params, Chunking, TildeParams};
pub use coupling::{collapse, couple_tilde, silent_violations, Collapsed, CoupledTriple, CouplingAudit};
pub use diagnostics::{assembled_bound, diagnostics, Diagnostics};
