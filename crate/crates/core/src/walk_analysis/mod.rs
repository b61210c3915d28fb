//! The lazy random walk: kernel, stationary law, exact total-variation
//! curves, spectral gap, hitting times and Monte Carlo mixing estimates.

pub mod hitting;
pub mod kernel;
pub mod mc;
pub mod spectral;
pub mod tv;

use serde::Serialize;

pub use hitting::{hitting_times, hitting_tmix_bound, max_hitting_time};
pub use kernel::{stationary, LazyKernel, StationaryMeasure};
pub use mc::{mc_tmix, McOptions};
pub use spectral::{spectral_bounds, spectral_gap, spectral_gap_with, spectral_tmix, SpectralGap, SpectralMethod, SpectralOptions};
pub use tv::{exact_tmix, exact_tmix_in, exact_tmix_with, tv_curve, tv_curve_with, ExactOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Spectral,
    Mc,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Spectral => "spectral",
            Method::Mc => "mc",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "exact" => Ok(Method::Exact),
            "spectral" => Ok(Method::Spectral),
            "mc" => Ok(Method::Mc),
            _ => Err(crate::Error::param("method", format!("unknown method `{s}`"))),
        }
    }
}

/// A mixing-time value with a bracket `lower <= t_mix <= upper`.
#[derive(Clone, Debug, Serialize)]
pub struct MixingEstimate {
    pub value: u64,
    pub method: Method,
    pub lower: u64,
    pub upper: u64,
    pub threshold: f64,
    pub gap: Option<f64>,
    pub resolved: bool,
    pub runtime_s: f64,
}
