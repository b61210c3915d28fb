use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TopologyKind {
    Torus,
    Segment,
}

impl TopologyKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TopologyKind::Torus => "torus",
            TopologyKind::Segment => "segment",
        }
    }
}

impl std::str::FromStr for TopologyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "torus" => Ok(TopologyKind::Torus),
            "segment" => Ok(TopologyKind::Segment),
            _ => Err(Error::param("topology", format!("unknown topology `{s}`"))),
        }
    }
}

/// Vertices are `0..n`; on the torus vertex 0 plays the role of n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Topology {
    pub kind: TopologyKind,
    pub n: usize,
}

impl Topology {
    pub fn torus(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::param("n", format!("torus needs at least 3 vertices, got {n}")));
        }
        Self::check_size(n)?;
        Ok(Topology { kind: TopologyKind::Torus, n })
    }

    pub fn segment(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::param("n", format!("segment needs at least 2 vertices, got {n}")));
        }
        Self::check_size(n)?;
        Ok(Topology { kind: TopologyKind::Segment, n })
    }

    pub fn new(kind: TopologyKind, n: usize) -> Result<Self> {
        match kind {
            TopologyKind::Torus => Self::torus(n),
            TopologyKind::Segment => Self::segment(n),
        }
    }

    fn check_size(n: usize) -> Result<()> {
        if n > u32::MAX as usize {
            return Err(Error::Resource(format!("N = {n} exceeds the 32-bit vertex index range")));
        }
        Ok(())
    }

    #[inline]
    pub fn distance(&self, x: usize, y: usize) -> usize {
        let d = x.abs_diff(y);
        match self.kind {
            TopologyKind::Torus => d.min(self.n - d),
            TopologyKind::Segment => d,
        }
    }

    pub fn max_distance(&self) -> usize {
        match self.kind {
            TopologyKind::Torus => self.n / 2,
            TopologyKind::Segment => self.n - 1,
        }
    }

    /// Nearest-neighbour pairs `(u, v)` with `u < v`.
    pub fn forced_edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let wrap = match self.kind {
            TopologyKind::Torus => Some((0u32, (self.n - 1) as u32)),
            TopologyKind::Segment => None,
        };
        (0..self.n - 1).map(|x| (x as u32, x as u32 + 1)).chain(wrap)
    }
}
