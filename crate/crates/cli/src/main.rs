use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;
use sfp_core::cheeger::{cheeger_bounds, exact_cheeger, slice_cheeger_certificate, EXACT_CHEEGER_CAP};
use sfp_core::coarse_grain::{couple_tilde, diagnostics, make_chunking, Chunking};
use sfp_core::concentration::{
    bernstein_coin_audit, concentration_audit, fuk_nagaev_audit, DegreeGivenWeight, Deterministic,
    FukNagaevConfig, SliceCounts,
};
use sfp_core::experiment_harness::{measure, run_scan_with, ScanConfig, ScanOptions};
use sfp_core::flows::{chunk_transfer_flow, congestion, flow_tmix_bound, geodesic_flow};
use sfp_core::graph_model::{self, generate, generate_simplified, sample_weights};
use sfp_core::structure_stats::{cut_points, degree_summary, diameter};
use sfp_core::walk_analysis::{stationary, Method};
use sfp_core::{Params, SfpGraph, Topology, TopologyKind};
use std::fs;
use std::path::{Path, PathBuf};

/// Scale-free percolation on the one-dimensional torus: generation, mixing
/// analysis and scaling experiments.
#[derive(Parser)]
#[command(name = "sfp-mixlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum TopologyArg {
    Torus,
    Segment,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Standard,
    Simplified,
    Longrange,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Exact,
    Spectral,
    Mc,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Bernstein,
    Fuknagaev,
    Audit,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a graph and write it in the SFPv1 text format.
    Generate {
        #[arg(long)]
        alpha: f64,
        /// Weight tail exponent; ignored by the long-range variant.
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "standard")]
        variant: VariantArg,
        #[arg(long, value_enum, default_value = "torus")]
        topology: TopologyArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Mixing time of the lazy walk on a graph file.
    Mix {
        #[arg(long)]
        graph: PathBuf,
        /// Defaults to exact below N = 64, spectral below 2^16, Monte Carlo above.
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        #[arg(long, default_value_t = 0.25)]
        threshold: f64,
        #[arg(long, default_value_t = 2000)]
        replicas: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Exact Cheeger constant or the slice-family certificate.
    Cheeger {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, conflicts_with = "slices")]
        exact: bool,
        #[arg(long)]
        slices: bool,
        /// Certificate exponent: passes when min Phi >= (ln N)^{-c0}.
        #[arg(long, default_value_t = 6.0)]
        c0: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Geodesic-flow congestion, optionally lifted from a chunked graph.
    Flows {
        #[arg(long)]
        graph: PathBuf,
        /// Chunk length L; builds the coupled chunk graph and transfers its flow.
        #[arg(long)]
        chunking: Option<usize>,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Chunk coarse-graining with the coupled dominated graph.
    Coarse {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cut-points of a segment graph, printed as JSON.
    Cutpoints {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Degree, Hill and distance statistics.
    Stats {
        #[arg(long)]
        graph: PathBuf,
        /// Top fraction used by the Hill estimator.
        #[arg(long, default_value_t = 0.01)]
        q: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Concentration bound audits.
    Bounds {
        #[arg(long, value_enum)]
        which: Which,
        /// JSON config; omitted fields take their defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Parameter scan with exponent fits and a plot.
    Scan {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn main() -> std::process::ExitCode {
    match run(Cli::parse()) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { alpha, tau, n, seed, variant, topology, out } => {
            let topology = match topology {
                TopologyArg::Torus => Topology::torus(n)?,
                TopologyArg::Segment => Topology::segment(n)?,
            };
            let need_tau = || tau.context("--tau is required for this variant");
            let g = match variant {
                VariantArg::Standard => generate(&Params::new(alpha, need_tau()?)?, topology, seed)?,
                VariantArg::Longrange => generate(&Params::long_range(alpha)?, topology, seed)?,
                VariantArg::Simplified => {
                    if topology.kind != TopologyKind::Torus {
                        bail!("the simplified model lives on the torus");
                    }
                    let p = Params::new(alpha, need_tau()?)?;
                    generate_simplified(&p, sample_weights(n, p.tau, seed)?, seed)?
                }
            };
            graph_model::save(&g, &out)?;
            println!("wrote {} ({} vertices, {} edges)", out.display(), g.n(), g.graph.num_edges());
        }
        Command::Mix { graph, method, threshold, replicas, out } => {
            let g = load(&graph)?;
            let cfg = ScanConfig { threshold, replicas, ..ScanConfig::default() };
            let method = match method {
                Some(MethodArg::Exact) => Method::Exact,
                Some(MethodArg::Spectral) => Method::Spectral,
                Some(MethodArg::Mc) => Method::Mc,
                None => cfg.method_for(g.n()),
            };
            let est = measure(&g.graph, method, &cfg, g.seed)?;
            let gap = est.gap.map(|v| v.to_string()).unwrap_or_default();
            let csv = format!(
                "N,alpha,tau,seed,method,tmix,lower,upper,gap,runtime_s\n{},{},{},{},{},{},{},{},{},{}\n",
                g.n(),
                g.params.alpha,
                g.params.tau,
                g.seed,
                est.method.as_str(),
                est.value,
                est.lower,
                est.upper,
                gap,
                est.runtime_s
            );
            fs::write(&out, csv)?;
            println!("t_mix = {} in [{}, {}] ({})", est.value, est.lower, est.upper, est.method.as_str());
        }
        Command::Cheeger { graph, exact, slices, c0, out } => {
            let g = load(&graph)?;
            let use_exact = exact || (!slices && g.n() <= EXACT_CHEEGER_CAP);
            let report = if use_exact {
                let r = exact_cheeger::<f64>(&g.graph)?;
                let pi_min = stationary::<f64>(&g.graph)?.min();
                let (lo, hi) = cheeger_bounds(r.phi, pi_min);
                println!("Phi* = {} (|S| = {})", r.phi, r.set.len());
                json!({
                    "kind": "exact",
                    "n": g.n(),
                    "phi": r.phi,
                    "set": r.set.members(),
                    "boundary": r.boundary,
                    "volume": r.volume,
                    "tmix_lower": lo,
                    "tmix_upper": hi,
                })
            } else {
                let r = slice_cheeger_certificate(&g, c0)?;
                println!("min Phi = {} at {} (threshold {}, passes {})", r.min_phi, r.argmin, r.threshold, r.passes);
                json!({ "kind": "slices", "certificate": r })
            };
            write_json(&out, &report)?;
        }
        Command::Flows { graph, chunking, eps, out } => {
            let g = load(&graph)?;
            let report = match chunking {
                None => {
                    let flow = geodesic_flow::<f64>(&g.graph)?;
                    let c = congestion(&g.graph, &flow)?;
                    let bound = flow_tmix_bound(c.rho, &g.graph);
                    println!("rho = {} on arc {:?}; t_mix <= {bound:.1}", c.rho, c.arc);
                    json!({
                        "kind": "geodesic",
                        "n": g.n(),
                        "rho": c.rho,
                        "arc": c.arc,
                        "tmix_bound": bound,
                        "feasibility_residual": flow.feasibility_residual(),
                    })
                }
                Some(len) => {
                    let mut triple = couple_tilde(&g, &Chunking::new(g.n(), len)?, eps)?;
                    // edges added where the coupling condition failed have no
                    // route in G; the lifted flow is built on the rest
                    let reps = &triple.collapsed.reps;
                    let (kept, dropped): (Vec<_>, Vec<_>) = triple.tilde.graph.edges().partition(|&(i, j)| {
                        g.graph.has_edge(reps[i as usize] as usize, reps[j as usize] as usize)
                            || triple.chunking.chunk_distance(i as usize, j as usize) == 1
                    });
                    if !dropped.is_empty() {
                        triple.tilde.graph = sfp_core::Graph::from_edges(triple.chunking.count, kept)?;
                    }
                    let base = geodesic_flow::<f64>(&triple.tilde.graph)?;
                    let base_c = congestion(&triple.tilde.graph, &base)?;
                    let lifted = chunk_transfer_flow(&triple, &base)?;
                    let c = congestion(&g.graph, &lifted.flow)?;
                    let bound = flow_tmix_bound(c.rho, &g.graph);
                    println!("K = {}; rho(chunk graph) = {}; rho(lifted) = {}; t_mix <= {bound:.1}", triple.chunking.count, base_c.rho, c.rho);
                    json!({
                        "kind": "transfer",
                        "n": g.n(),
                        "chunking": triple.chunking,
                        "dropped_tilde_edges": dropped,
                        "tilde_rho": base_c.rho,
                        "rho": c.rho,
                        "arc": c.arc,
                        "tmix_bound": bound,
                        "feasibility_residual": lifted.flow.feasibility_residual(),
                        "transfer": lifted.audit,
                        "coupling": triple.audit,
                    })
                }
            };
            write_json(&out, &report)?;
        }
        Command::Coarse { graph, eps, out } => {
            let g = load(&graph)?;
            let chunking = make_chunking(g.n(), &g.params, eps)?;
            let triple = couple_tilde(&g, &chunking, eps)?;
            let d = diagnostics(&triple)?;
            let edges = |gr: &sfp_core::Graph| gr.edges().collect::<Vec<_>>();
            println!(
                "K = {}, L = {}; |E(G)|/|E(tilde)| = {:.2}; condition failures {}; silent violations {}",
                chunking.count,
                chunking.len,
                d.edge_ratio,
                triple.audit.condition_failures.len(),
                triple.audit.silent_violations
            );
            let report = json!({
                "chunking": chunking,
                "tilde_params": triple.tilde_params,
                "gamma": {
                    "k": chunking.count,
                    "reps": triple.collapsed.reps,
                    "rep_weights": triple.collapsed.rep_weights,
                    "edges": edges(&triple.collapsed.graph),
                },
                "tilde": {
                    "k": chunking.count,
                    "weights": triple.tilde.weights,
                    "edges": edges(&triple.tilde.graph),
                },
                "audit": triple.audit,
                "diagnostics": d,
            });
            write_json(&out, &report)?;
        }
        Command::Cutpoints { graph, out } => {
            let r = cut_points(&load(&graph)?)?;
            let text = serde_json::to_string_pretty(&r)?;
            match out {
                Some(path) => fs::write(path, text + "\n")?,
                None => println!("{text}"),
            }
        }
        Command::Stats { graph, q, out } => {
            let g = load(&graph)?;
            let deg = degree_summary(&g, q)?;
            let (components, _) = g.graph.components();
            let diam = if components == 1 && g.n() <= DIAMETER_CAP { Some(diameter(&g.graph)?) } else { None };
            let cuts = (g.topology.kind == TopologyKind::Segment)
                .then(|| cut_points(&g))
                .transpose()?
                .map(|r| json!({ "cut_density": r.cut_density, "good_density": r.good_density }));
            println!(
                "N = {}, edges = {}, mean degree {:.3}, max degree {}, components {components}",
                g.n(),
                deg.edges,
                deg.mean_degree,
                deg.max_degree
            );
            let report = json!({
                "variant": g.variant.as_str(),
                "topology": g.topology.kind.as_str(),
                "alpha": g.params.alpha,
                "tau": g.params.tau,
                "gamma": g.params.gamma,
                "seed": g.seed,
                "components": components,
                "diameter": diam,
                "degrees": deg,
                "cut_points": cuts,
            });
            write_json(&out, &report)?;
        }
        Command::Bounds { which, config, out } => {
            let text = match &config {
                Some(p) => fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
                None => "{}".into(),
            };
            let report = match which {
                Which::Bernstein => {
                    let c: BernsteinConfig = serde_json::from_str(&text)?;
                    let audit = bernstein_coin_audit(c.n, &c.us, c.trials, c.seed)?;
                    println!("Bernstein: {} violations over {} rows", audit.violations, audit.rows.len());
                    serde_json::to_value(audit)?
                }
                Which::Fuknagaev => {
                    let c: FukNagaevConfig = serde_json::from_str(&text)?;
                    let audit = fuk_nagaev_audit(&c)?;
                    println!(
                        "Fuk-Nagaev: calibrated c = {:.4}; violations train {} validate {} reference {}",
                        audit.calibrated_c, audit.train.violations, audit.validate.violations, audit.reference.violations
                    );
                    serde_json::to_value(audit)?
                }
                Which::Audit => {
                    let c: AuditConfig = serde_json::from_str(&text)?;
                    let report = match c.family {
                        Family::Degree => {
                            let p = Params::new(c.alpha, c.tau)?;
                            concentration_audit(&DegreeGivenWeight::new(p, c.n, c.weights)?, &c.u_schedule, c.trials, c.seed)?
                        }
                        Family::Slices => {
                            let p = Params::new(c.alpha, c.tau)?;
                            concentration_audit(&SliceCounts::new(p, c.n)?, &c.u_schedule, c.trials, c.seed)?
                        }
                        Family::Deterministic => {
                            let values = if c.values.is_empty() { vec![1.0; c.n] } else { c.values };
                            concentration_audit(&Deterministic { values }, &c.u_schedule, c.trials, c.seed)?
                        }
                    };
                    println!(
                        "audit: {} of {} components audited, {} violations",
                        report.audited(),
                        report.components.len(),
                        report.violations()
                    );
                    serde_json::to_value(report)?
                }
            };
            write_json(&out, &report)?;
        }
        Command::Scan { config, out, threads } => {
            let cfg = ScanConfig::load(&config)?;
            let s = run_scan_with(&cfg, &out, &ScanOptions { threads })?;
            println!("{}: {} rows ({} computed, {} reused)", s.results.display(), s.rows.len(), s.computed, s.skipped);
            for f in &s.fits {
                let predicted = f.prediction.as_ref().and_then(|p| p.slope).map_or("-".to_string(), |v| format!("{v:.2}"));
                match &f.fit {
                    Some(fit) => println!("  {}: slope {:.3} +- {:.3} (predicted {predicted})", f.point_id, fit.slope, fit.stderr),
                    None => println!("  {}: no fit ({})", f.point_id, f.fit_error.as_deref().unwrap_or("?")),
                }
            }
        }
    }
    Ok(())
}

/// Largest N for which `stats` computes the all-pairs BFS diameter.
const DIAMETER_CAP: usize = 1 << 13;

fn load(path: &Path) -> Result<SfpGraph> {
    graph_model::load(path).with_context(|| format!("loading {}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n").with_context(|| format!("writing {}", path.display()))
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct BernsteinConfig {
    n: usize,
    us: Vec<f64>,
    trials: u64,
    seed: u64,
}

impl Default for BernsteinConfig {
    fn default() -> Self {
        BernsteinConfig { n: 10_000, us: vec![100.0, 200.0, 300.0, 400.0, 500.0], trials: 100_000, seed: 1 }
    }
}

#[derive(Deserialize, Clone, Copy)]
#[serde(rename_all = "lowercase")]
enum Family {
    Degree,
    Slices,
    Deterministic,
}

#[derive(Deserialize)]
#[serde(default, deny_unknown_fields)]
struct AuditConfig {
    family: Family,
    alpha: f64,
    tau: f64,
    n: usize,
    /// Fixed vertex weights for the degree family.
    weights: Vec<f64>,
    /// Summands for the deterministic family; N ones when empty.
    values: Vec<f64>,
    /// Deviations tested, as multiples of U_N = sqrt(S) ln N.
    u_schedule: Vec<f64>,
    trials: u64,
    seed: u64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            family: Family::Degree,
            alpha: 0.6,
            tau: 2.5,
            n: 100_000,
            weights: vec![1.0, 10.0, 100.0],
            values: Vec::new(),
            u_schedule: vec![0.5, 1.0, 2.0],
            trials: 1000,
            seed: 1,
        }
    }
}
