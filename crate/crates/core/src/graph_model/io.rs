//! Plain-text graph files.
//!
//! ```text
//! SFPv1 <variant> <N> <alpha> <tau> <seed> [segment]
//! W <x> <weight>        (one line per vertex)
//! E <u> <v>             (one line per edge, u < v)
//! ```
//! Floats use the shortest representation that round-trips. The trailing
//! topology token is written only for segment graphs.

use super::graph::{Graph, SfpGraph, Variant, WeightVector};
use super::params::PhaseParams;
use super::topology::{Topology, TopologyKind};
use crate::error::{Error, Result};
use std::fmt::Write as _;
use std::path::Path;

const MAGIC: &str = "SFPv1";

pub fn serialize(g: &SfpGraph) -> String {
    let mut s = String::with_capacity(32 * (g.n() + g.graph.num_edges()));
    write!(s, "{MAGIC} {} {} {} {} {}", g.variant.as_str(), g.n(), g.params.alpha, g.params.tau, g.seed).unwrap();
    if g.topology.kind == TopologyKind::Segment {
        s.push_str(" segment");
    }
    s.push('\n');
    for (x, w) in g.weights.as_slice().iter().enumerate() {
        writeln!(s, "W {x} {w}").unwrap();
    }
    for (u, v) in g.graph.edges() {
        writeln!(s, "E {u} {v}").unwrap();
    }
    s
}

pub fn save(g: &SfpGraph, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, serialize(g))?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<SfpGraph> {
    deserialize(&std::fs::read_to_string(path)?)
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, name: &'static str) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::Parse { line, field: name, reason: "missing".into() })?;
    tok.parse().map_err(|_| Error::Parse { line, field: name, reason: format!("cannot parse `{tok}`") })
}

pub fn deserialize(text: &str) -> Result<SfpGraph> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or(Error::Parse { line: 1, field: "magic", reason: "empty file".into() })?;
    let mut tok = header.split_whitespace();
    match tok.next() {
        Some(MAGIC) => {}
        Some(m) if m.starts_with("SFPv") => return Err(Error::Version { found: m.to_string() }),
        other => {
            return Err(Error::Parse { line: 1, field: "magic", reason: format!("expected {MAGIC}, found {other:?}") })
        }
    }
    let variant: Variant = field::<String>(tok.next(), 1, "variant")?
        .parse()
        .map_err(|_| Error::Parse { line: 1, field: "variant", reason: "unknown variant".into() })?;
    let n: usize = field(tok.next(), 1, "N")?;
    let alpha: f64 = field(tok.next(), 1, "alpha")?;
    let tau: f64 = field(tok.next(), 1, "tau")?;
    let seed: u64 = field(tok.next(), 1, "seed")?;
    let kind = match tok.next() {
        None => TopologyKind::Torus,
        Some(t) => t.parse().map_err(|_| Error::Parse { line: 1, field: "topology", reason: format!("`{t}`") })?,
    };
    if let Some(extra) = tok.next() {
        return Err(Error::Parse { line: 1, field: "header", reason: format!("unexpected token `{extra}`") });
    }
    let params = PhaseParams::new(alpha, tau).map_err(|e| Error::Parse { line: 1, field: "alpha/tau", reason: e.to_string() })?;
    let topology = Topology::new(kind, n).map_err(|e| Error::Parse { line: 1, field: "N", reason: e.to_string() })?;

    let mut weights: Vec<Option<f64>> = vec![None; n];
    let mut edges: Vec<(u32, u32)> = Vec::new();
    for (ln, line) in lines {
        let mut tok = line.split_whitespace();
        match tok.next() {
            None => continue,
            Some("W") => {
                let x: usize = field(tok.next(), ln, "x")?;
                let w: f64 = field(tok.next(), ln, "weight")?;
                if x >= n {
                    return Err(Error::Parse { line: ln, field: "x", reason: format!("vertex {x} out of range") });
                }
                if !(w >= 1.0 && w.is_finite()) {
                    return Err(Error::Parse { line: ln, field: "weight", reason: format!("{w} is not a finite value >= 1") });
                }
                if weights[x].replace(w).is_some() {
                    return Err(Error::Parse { line: ln, field: "x", reason: format!("duplicate weight for vertex {x}") });
                }
            }
            Some("E") => {
                let u: u32 = field(tok.next(), ln, "u")?;
                let v: u32 = field(tok.next(), ln, "v")?;
                if u as usize >= n || v as usize >= n {
                    return Err(Error::Parse { line: ln, field: "v", reason: format!("edge ({u}, {v}) out of range") });
                }
                if u >= v {
                    return Err(Error::Parse {
                        line: ln,
                        field: "u",
                        reason: format!("asymmetric edge record ({u}, {v}); edges are listed once with u < v"),
                    });
                }
                edges.push((u, v));
            }
            Some(t) => return Err(Error::Parse { line: ln, field: "tag", reason: format!("unknown record `{t}`") }),
        }
        if let Some(extra) = tok.next() {
            return Err(Error::Parse { line: ln, field: "record", reason: format!("unexpected token `{extra}`") });
        }
    }
    let mut w = Vec::with_capacity(n);
    for (x, v) in weights.into_iter().enumerate() {
        w.push(v.ok_or(Error::Parse { line: 0, field: "W", reason: format!("missing weight for vertex {x}") })?);
    }
    let before = edges.len();
    edges.sort_unstable();
    edges.dedup();
    if edges.len() != before {
        return Err(Error::Domain("duplicate edge records".into()));
    }
    let graph = Graph::from_edges(n, edges)?;
    SfpGraph::new(topology, params, WeightVector::new(w)?, graph, seed, variant)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_model::generate::generate;

    #[test]
    fn round_trip_is_exact() {
        let p = PhaseParams::new(1.7, 2.3).unwrap();
        for t in [Topology::torus(80).unwrap(), Topology::segment(50).unwrap()] {
            let g = generate(&p, t, 11).unwrap();
            let h = deserialize(&serialize(&g)).unwrap();
            assert_eq!(g.graph, h.graph);
            assert_eq!(g.weights, h.weights);
            assert_eq!(g.params, h.params);
            assert_eq!(g.topology, h.topology);
            assert_eq!(serialize(&h), serialize(&g));
        }
    }

    #[test]
    fn parse_errors_name_line_and_field() {
        let bad = "SFPv1 standard 3 1.5 2.5 1\nW 0 1\nW 1 x\nW 2 1\n";
        match deserialize(bad) {
            Err(Error::Parse { line: 3, field: "weight", .. }) => {}
            other => panic!("{other:?}"),
        }
        let asym = "SFPv1 standard 3 1.5 2.5 1\nW 0 1\nW 1 1\nW 2 1\nE 0 1\nE 2 1\nE 0 2\n";
        assert!(matches!(deserialize(asym), Err(Error::Parse { line: 6, field: "u", .. })));
        assert!(matches!(deserialize("SFPv2 standard 3 1 2 1\n"), Err(Error::Version { .. })));
    }

    #[test]
    fn long_range_tau_is_infinite() {
        let g = crate::graph_model::generate::generate_long_range(1.5, Topology::torus(10).unwrap(), 1).unwrap();
        let s = serialize(&g);
        assert!(s.starts_with("SFPv1 longrange 10 1.5 inf 1\n"));
        assert_eq!(deserialize(&s).unwrap().graph, g.graph);
    }
}
