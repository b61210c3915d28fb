use super::vertex_set::{bottleneck_ratio, half_torus_set, VertexSet};
use crate::error::{Error, Result};
use crate::graph_model::{Graph, PhaseParams, SfpGraph, WeightVector};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SliceKind {
    /// V_j
    Upper,
    /// V_{j^c}
    Lower,
    /// V_j^+
    UpperPlus,
    /// V_{j^c}^+
    LowerPlus,
}

#[derive(Clone, Debug, Serialize)]
pub struct Slice {
    pub kind: SliceKind,
    pub j: usize,
    pub lo: f64,
    pub hi: f64,
    pub members: Vec<u32>,
    /// Centre c of the size bracket [c/2, 2c].
    pub bracket_center: f64,
}

impl Slice {
    pub fn label(&self) -> String {
        match self.kind {
            SliceKind::Upper => format!("V_{}", self.j),
            SliceKind::Lower => format!("V_{}c", self.j),
            SliceKind::UpperPlus => format!("V_{}+", self.j),
            SliceKind::LowerPlus => format!("V_{}c+", self.j),
        }
    }

    pub fn within_bracket(&self) -> bool {
        let s = self.members.len() as f64;
        s >= 0.5 * self.bracket_center && s <= 2.0 * self.bracket_center
    }
}

/// Weight slices for the simplified model.
#[derive(Clone, Debug, Serialize)]
pub struct SliceFamily {
    pub n: usize,
    pub j_max: usize,
    pub delta: f64,
    pub q: f64,
    pub slices: Vec<Slice>,
}

impl SliceFamily {
    pub fn get(&self, kind: SliceKind, j: usize) -> Option<&Slice> {
        self.slices.iter().find(|s| s.kind == kind && s.j == j)
    }

    pub fn of_kind(&self, kind: SliceKind) -> impl Iterator<Item = &Slice> {
        self.slices.iter().filter(move |s| s.kind == kind)
    }
}

/// Builds V_j, V_{j^c}, V_j^+ and V_{j^c}^+ from the weights alone.
///
/// With the integer j_max the top regular slice V_{j_max - 1} would stop at
/// N^{alpha/2} (ln N)^{j_max}, short of N^alpha (ln N)^2 where V_{j_max}
/// starts; its upper end is extended to close that gap so the V_j keep
/// partitioning the weights above N^{alpha/2} ln N.
pub fn build_slices(weights: &WeightVector, params: &PhaseParams<f64>) -> Result<SliceFamily> {
    let n = weights.len();
    if !(params.gamma < 1.0) {
        return Err(Error::param("gamma", format!("weight slices need gamma < 1, got {}", params.gamma)));
    }
    if n < 16 {
        return Err(Error::param("n", "weight slices need N >= 16"));
    }
    let nf = n as f64;
    let ln = nf.ln();
    let (alpha, tau, gamma) = (params.alpha, params.tau, params.gamma);
    let j_max = (2.0 + alpha / 2.0 * ln / ln.ln()).floor() as usize;
    let delta = 2f64.powf(-1.0 / (tau - 1.0));
    let q = ln.powf(tau - 1.0);
    let base = nf.powf(alpha / 2.0);
    let top = nf.powf(alpha) * ln * ln;
    let scale = nf.powf(1.0 - gamma / 2.0);
    let w = weights.as_slice();
    let collect = |lo: f64, hi: f64| -> Vec<u32> {
        (0..n).filter(|&x| w[x] >= lo && w[x] < hi).map(|x| x as u32).collect()
    };
    let mut slices = Vec::new();
    for j in 1..=j_max {
        let ji = j as i32;
        let (lo, hi) = if j == j_max {
            (top, f64::INFINITY)
        } else if j + 1 == j_max {
            (base * ln.powi(ji), top)
        } else {
            (base * ln.powi(ji), base * ln.powi(ji + 1))
        };
        let center = scale * q.powi(-ji);
        slices.push(Slice { kind: SliceKind::Upper, j, lo, hi, members: collect(lo, hi), bracket_center: center });
        let (lo, hi) = (base * ln.powi(2 - ji), base * ln.powi(3 - ji));
        let center = scale * q.powi(ji - 2);
        slices.push(Slice { kind: SliceKind::Lower, j, lo, hi, members: collect(lo, hi), bracket_center: center });
        let (lo, hi) = (delta * base * ln.powi(3 - ji), base * ln.powi(3 - ji));
        let center = scale * q.powi(ji - 3);
        slices.push(Slice { kind: SliceKind::LowerPlus, j, lo, hi, members: collect(lo, hi), bracket_center: center });
        if j < j_max {
            let (lo, hi) = (delta * base * ln.powi(ji + 1), base * ln.powi(ji + 1));
            let center = scale * q.powi(-(ji + 1));
            slices.push(Slice { kind: SliceKind::UpperPlus, j, lo, hi, members: collect(lo, hi), bracket_center: center });
        }
    }
    Ok(SliceFamily { n, j_max, delta, q, slices })
}

#[derive(Clone, Debug, Serialize)]
pub struct SetRatio {
    pub label: String,
    pub size: usize,
    pub mass: f64,
    pub phi: f64,
    pub complemented: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateReport {
    pub n: usize,
    pub j_max: usize,
    pub threshold: f64,
    pub min_phi: f64,
    pub argmin: String,
    pub passes: bool,
    pub evaluated: Vec<SetRatio>,
    pub skipped: Vec<String>,
}

fn evaluate(graph: &Graph, label: String, set: VertexSet, out: &mut CertificateReport) {
    if set.is_empty() || set.len() == graph.n() {
        out.skipped.push(format!("{label}: empty or full"));
        return;
    }
    let mass: f64 = set.mass(graph);
    let (set, complemented) = if mass > 0.5 { (set.complement(graph), true) } else { (set, false) };
    match bottleneck_ratio::<f64>(graph, &set) {
        Ok(phi) => {
            if phi < out.min_phi {
                out.min_phi = phi;
                out.argmin = label.clone();
            }
            out.evaluated.push(SetRatio { label, size: set.len(), mass: set.mass(graph), phi, complemented });
        }
        Err(_) => out.skipped.push(format!("{label}: zero volume")),
    }
}

/// Evaluates Phi on the slice family, on the upper level sets
/// {W >= lower end of V_j}, on the half torus, and on complements where the
/// stationary mass exceeds 1/2. Passes when the minimum is at least
/// (ln N)^{-c0}.
pub fn slice_cheeger_certificate(g: &SfpGraph, c0: f64) -> Result<CertificateReport> {
    g.require_torus("slice certificate")?;
    let family = build_slices(&g.weights, &g.params)?;
    let graph = &g.graph;
    let ln = (g.n() as f64).ln();
    let mut report = CertificateReport {
        n: g.n(),
        j_max: family.j_max,
        threshold: ln.powf(-c0),
        min_phi: f64::INFINITY,
        argmin: String::new(),
        passes: false,
        evaluated: Vec::new(),
        skipped: Vec::new(),
    };
    for s in &family.slices {
        let set = VertexSet::from_members(graph, s.members.iter().map(|&x| x as usize))?;
        evaluate(graph, s.label(), set, &mut report);
    }
    let w = g.weights.as_slice();
    for s in family.of_kind(SliceKind::Upper).chain(family.of_kind(SliceKind::Lower)) {
        let set = VertexSet::from_predicate(graph, |x| w[x] >= s.lo);
        evaluate(graph, format!("W>={:.4e}", s.lo), set, &mut report);
    }
    evaluate(graph, "half-torus".into(), half_torus_set(graph), &mut report);
    report.passes = report.min_phi >= report.threshold;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_model::{generate_simplified, sample_weights};

    #[test]
    fn upper_slices_partition_heavy_vertices() {
        let p = PhaseParams::new(0.6, 2.5).unwrap();
        let w = sample_weights(20_000, 2.5, 4).unwrap();
        let fam = build_slices(&w, &p).unwrap();
        let n = 20_000f64;
        let cut = n.powf(0.3) * n.ln();
        let heavy = w.as_slice().iter().filter(|&&v| v >= cut).count();
        let covered: usize = fam.of_kind(SliceKind::Upper).map(|s| s.members.len()).sum();
        assert_eq!(heavy, covered);
        let mut seen = std::collections::HashSet::new();
        for s in fam.of_kind(SliceKind::Upper) {
            for &x in &s.members {
                assert!(seen.insert(x));
            }
        }
        // V_1 and V_1c coincide
        assert_eq!(fam.get(SliceKind::Upper, 1).unwrap().members, fam.get(SliceKind::Lower, 1).unwrap().members);
    }

    #[test]
    fn hub_belongs_to_top_slice() {
        let p = PhaseParams::new(0.6, 2.5).unwrap();
        let n = 1000usize;
        let mut w = vec![1.0; n];
        w[17] = (n as f64).powf(0.6) * (n as f64).ln().powi(2);
        let fam = build_slices(&WeightVector::new(w).unwrap(), &p).unwrap();
        assert_eq!(fam.get(SliceKind::Upper, fam.j_max).unwrap().members, vec![17]);
    }

    #[test]
    fn certificate_runs() {
        let p = PhaseParams::new(0.6, 2.5).unwrap();
        let w = sample_weights(3000, 2.5, 1).unwrap();
        let g = generate_simplified(&p, w, 1).unwrap();
        let r = slice_cheeger_certificate(&g, 6.0).unwrap();
        assert!(r.evaluated.iter().all(|s| s.mass <= 0.5 + 1e-12));
    }
}
