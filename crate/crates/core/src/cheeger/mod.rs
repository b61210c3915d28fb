//! Bottleneck ratios, the exact Cheeger constant of small graphs and the
//! weight-slice certificate for the simplified model.

pub mod exact;
pub mod slices;
pub mod vertex_set;

pub use exact::{cheeger_bounds, exact_cheeger, CheegerResult, EXACT_CHEEGER_CAP};
pub use slices::{build_slices, slice_cheeger_certificate, CertificateReport, Slice, SliceFamily, SliceKind};
pub use vertex_set::{bottleneck_ratio, half_torus_set, SetSummary, VertexSet};
