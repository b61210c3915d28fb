//! Parameter scans over (alpha, tau, N, seed), exponent fits and the phase
//! prediction table.

pub mod fit;
pub mod phase;
pub mod plot;
pub mod scan;

pub use fit::{fit_exponent, least_squares, median, ExponentFit, LineFit};
pub use phase::{phase_predict, Phase, PhasePrediction};
pub use plot::scan_svg;
pub use scan::{measure, point_fits, run_scan, run_scan_with, PointFit, ScanConfig, ScanOptions, ScanPoint, ScanRow, ScanSummary};
