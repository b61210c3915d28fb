//! Structural statistics: distances and diameters, dyadic hub paths,
//! degree tails, cut-points of segment graphs and link-probability decay.

pub mod cut_points;
pub mod degree;
pub mod distance;
pub mod hub_path;
pub mod link_tail;

pub use cut_points::{cut_points, cut_points_of, CutPointReport};
pub use degree::{degree_summary, hill_estimate, DegreeBin, DegreeSummary, HillEstimate};
pub use distance::{bfs_distances, chunk_diameters, diameter, eccentricity, ChunkDiameter};
pub use hub_path::{dyadic_hub_path, HubPath, HubPathOutcome};
pub use link_tail::{link_tail_check, LinkTailReport, TailBranch, TailPoint};
