//! Closed-form tail inequalities and Monte Carlo comparisons against them.

pub mod audit;
pub mod bounds;

pub use audit::{
    bernstein_coin_audit, concentration_audit, fuk_nagaev_audit, pareto_expectation, pareto_sum_draws, Component,
    ComponentAudit, ConcentrationReport, DegreeGivenWeight, Deterministic, FukNagaevAudit, FukNagaevConfig, SliceCounts,
    SummandFamily, TailComparison, TailRow,
};
pub use bounds::{bernstein_bound, fuk_nagaev_bound, wilson_interval, Z99};
