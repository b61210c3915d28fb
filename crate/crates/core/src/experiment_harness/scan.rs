use super::fit::{fit_exponent, ExponentFit};
use super::phase::{phase_predict, PhasePrediction};
use super::plot::scan_svg;
use crate::error::{Error, Result};
use crate::graph_model::{generate, PhaseParams, Topology};
use crate::rng::{mix64, Purpose, RngStream};
use crate::walk_analysis::{exact_tmix, mc_tmix, spectral_tmix, McOptions, Method, MixingEstimate, SpectralOptions};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScanPoint {
    pub id: String,
    pub alpha: f64,
    /// Absent for long-range percolation (all weights 1).
    #[serde(default)]
    pub tau: Option<f64>,
}

impl ScanPoint {
    pub fn params(&self) -> Result<PhaseParams<f64>> {
        match self.tau {
            Some(tau) => PhaseParams::new(self.alpha, tau),
            None => PhaseParams::long_range(self.alpha),
        }
    }
}

fn default_exact_below() -> usize {
    64
}
fn default_spectral_below() -> usize {
    1 << 16
}
fn default_dense_cap() -> usize {
    SpectralOptions::default().dense_cap
}
fn default_threshold() -> f64 {
    0.25
}
fn default_replicas() -> usize {
    2000
}
fn default_results() -> String {
    "results.csv".into()
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub points: Vec<ScanPoint>,
    pub n_schedule: Vec<usize>,
    pub seeds: usize,
    pub master_seed: u64,
    /// N < exact_below uses the exact TV curve.
    #[serde(default = "default_exact_below")]
    pub exact_below: usize,
    /// exact_below <= N < spectral_below uses the spectral proxy, larger N Monte Carlo.
    #[serde(default = "default_spectral_below")]
    pub spectral_below: usize,
    #[serde(default = "default_dense_cap")]
    pub dense_cap: usize,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default = "default_replicas")]
    pub replicas: usize,
    #[serde(default = "default_results")]
    pub results: String,
    /// Write wall-clock times into the results CSV. Off by default so that
    /// reruns are byte-identical; timings always go to timings.csv.
    #[serde(default)]
    pub record_runtime: bool,
}

/// Empty point list and schedule; the remaining fields hold the values used
/// when a config file omits them.
impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            points: Vec::new(),
            n_schedule: Vec::new(),
            seeds: 10,
            master_seed: 0,
            exact_below: default_exact_below(),
            spectral_below: default_spectral_below(),
            dense_cap: default_dense_cap(),
            threshold: default_threshold(),
            replicas: default_replicas(),
            results: default_results(),
            record_runtime: false,
        }
    }
}

impl ScanConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScanConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::param("points", "at least one (alpha, tau) point is required"));
        }
        let mut ids = std::collections::HashSet::new();
        for p in &self.points {
            if p.id.is_empty() || p.id.contains([',', '"', '\n', '\r']) {
                return Err(Error::param("points", format!("point id `{}` must be non-empty plain text", p.id)));
            }
            if !ids.insert(&p.id) {
                return Err(Error::param("points", format!("duplicate point id `{}`", p.id)));
            }
            p.params()?;
        }
        if self.n_schedule.is_empty() {
            return Err(Error::param("n_schedule", "must not be empty"));
        }
        if self.n_schedule.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param("n_schedule", "must be strictly increasing"));
        }
        if self.n_schedule[0] < 3 {
            return Err(Error::param("n_schedule", "the torus needs N >= 3"));
        }
        if self.seeds < 3 {
            return Err(Error::param("seeds", "need at least 3 seeds per point for slope fitting"));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::param("threshold", "must lie in (0, 1)"));
        }
        if self.exact_below > self.spectral_below {
            return Err(Error::param("exact_below", "must not exceed spectral_below"));
        }
        if self.replicas == 0 {
            return Err(Error::param("replicas", "must be positive"));
        }
        if self.results.is_empty() || self.results.contains(['/', '\\']) {
            return Err(Error::param("results", "must be a plain file name"));
        }
        Ok(())
    }

    pub fn method_for(&self, n: usize) -> Method {
        if n < self.exact_below {
            Method::Exact
        } else if n < self.spectral_below {
            Method::Spectral
        } else {
            Method::Mc
        }
    }

    /// Graph seed for replicate `k` of `point` at size `n`.
    pub fn graph_seed(&self, point: &ScanPoint, n: usize, k: usize) -> u64 {
        let id = point.id.bytes().fold(0u64, |h, b| mix64(h ^ b as u64));
        RngStream::new(self.master_seed).purpose(Purpose::Scan).index(id).index(n as u64).index(k as u64).bits()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ScanRow {
    pub point_id: String,
    pub alpha: f64,
    pub tau: f64,
    pub gamma: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub seed: u64,
    pub method: String,
    pub tmix: Option<u64>,
    pub lower: Option<u64>,
    pub upper: Option<u64>,
    pub gap: Option<f64>,
    pub runtime_s: Option<f64>,
    pub error: Option<String>,
}

type RowKey = (String, usize, u64);

impl ScanRow {
    fn key(&self) -> RowKey {
        (self.point_id.clone(), self.n, self.seed)
    }
}

#[derive(Clone, Debug)]
struct Job {
    point: usize,
    n: usize,
    seed: u64,
}

#[derive(Clone, Debug, Default)]
pub struct ScanOptions {
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PointFit {
    pub point_id: String,
    pub prediction: Option<PhasePrediction>,
    pub fit: Option<ExponentFit>,
    pub fit_error: Option<String>,
}

#[derive(Clone, Debug)]
pub struct ScanSummary {
    pub results: PathBuf,
    pub rows: Vec<ScanRow>,
    pub computed: usize,
    pub skipped: usize,
    pub fits: Vec<PointFit>,
}

pub fn measure(graph: &crate::graph_model::Graph, method: Method, cfg: &ScanConfig, seed: u64) -> Result<MixingEstimate> {
    let spectral = SpectralOptions { dense_cap: cfg.dense_cap, seed: mix64(seed ^ 0x5eed), ..Default::default() };
    match method {
        Method::Exact => exact_tmix(graph, cfg.threshold),
        Method::Spectral => spectral_tmix(graph, cfg.threshold, &spectral),
        Method::Mc => mc_tmix(
            graph,
            &McOptions { replicas: cfg.replicas, threshold: cfg.threshold, seed: mix64(seed), spectral, ..Default::default() },
        ),
    }
}

fn run_job(cfg: &ScanConfig, job: &Job) -> (ScanRow, f64) {
    let point = &cfg.points[job.point];
    let method = cfg.method_for(job.n);
    let start = Instant::now();
    let outcome = point
        .params()
        .and_then(|p| generate(&p, Topology::torus(job.n)?, job.seed))
        .and_then(|g| measure(&g.graph, method, cfg, job.seed));
    let elapsed = start.elapsed().as_secs_f64();
    let tau = point.tau.unwrap_or(f64::INFINITY);
    let mut row = ScanRow {
        point_id: point.id.clone(),
        alpha: point.alpha,
        tau,
        gamma: point.alpha * (tau - 1.0),
        n: job.n,
        seed: job.seed,
        method: method.as_str().into(),
        tmix: None,
        lower: None,
        upper: None,
        gap: None,
        runtime_s: cfg.record_runtime.then_some(elapsed),
        error: None,
    };
    match outcome {
        Ok(est) => {
            row.tmix = Some(est.value);
            row.lower = Some(est.lower);
            row.upper = Some(est.upper);
            row.gap = est.gap;
        }
        Err(e) => row.error = Some(e.code().into()),
    }
    (row, elapsed)
}

fn read_rows(path: &Path) -> Result<Vec<ScanRow>> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_path(path)?;
    // a row cut short by an interrupted run fails to parse and is recomputed
    Ok(rdr.deserialize::<ScanRow>().filter_map(|r| r.ok()).collect())
}

fn write_rows(path: &Path, rows: &[ScanRow]) -> Result<()> {
    let tmp = path.with_extension("csv.tmp");
    {
        let mut w = csv::Writer::from_path(&tmp)?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

const HEADER: &str = "point_id,alpha,tau,gamma,N,seed,method,tmix,lower,upper,gap,runtime_s,error\n";

pub fn run_scan(cfg: &ScanConfig, out_dir: impl AsRef<Path>) -> Result<ScanSummary> {
    run_scan_with(cfg, out_dir, &ScanOptions::default())
}

/// Runs every (point, N, seed) job not already present in the results file,
/// appending rows as they finish, then rewrites the file in configuration
/// order and emits fits.json and plot.svg next to it.
pub fn run_scan_with(cfg: &ScanConfig, out_dir: impl AsRef<Path>, opts: &ScanOptions) -> Result<ScanSummary> {
    cfg.validate()?;
    let out_dir = out_dir.as_ref();
    fs::create_dir_all(out_dir)?;
    let results = out_dir.join(&cfg.results);

    let jobs: Vec<Job> = (0..cfg.points.len())
        .flat_map(|p| {
            cfg.n_schedule
                .iter()
                .flat_map(move |&n| (0..cfg.seeds).map(move |k| Job { point: p, n, seed: cfg.graph_seed(&cfg.points[p], n, k) }))
        })
        .collect();
    let order: HashMap<RowKey, usize> =
        jobs.iter().enumerate().map(|(i, j)| ((cfg.points[j.point].id.clone(), j.n, j.seed), i)).collect();

    let mut done: BTreeMap<usize, ScanRow> = BTreeMap::new();
    if results.exists() {
        for row in read_rows(&results)? {
            match order.get(&row.key()) {
                Some(&i) => {
                    done.insert(i, row);
                }
                None => {
                    return Err(Error::param(
                        "results",
                        format!("{} holds rows from a different scan (point `{}`, N = {})", results.display(), row.point_id, row.n),
                    ))
                }
            }
        }
    }
    // canonical rewrite drops any torn trailing line before appending
    write_rows(&results, &done.values().cloned().collect::<Vec<_>>())?;
    if done.is_empty() {
        fs::write(&results, HEADER)?;
    }
    let skipped = done.len();
    let todo: Vec<(usize, &Job)> = jobs.iter().enumerate().filter(|(i, _)| !done.contains_key(i)).collect();

    let appender = Mutex::new(OpenOptions::new().append(true).open(&results)?);
    let run = || -> Result<Vec<(usize, ScanRow, f64)>> {
        todo.par_iter()
            .map(|&(i, job)| {
                let (row, elapsed) = run_job(cfg, job);
                let mut line = csv::WriterBuilder::new().has_headers(false).from_writer(vec![]);
                line.serialize(&row)?;
                let bytes = line.into_inner().map_err(|e| Error::Io(e.into_error()))?;
                let mut f = appender.lock().unwrap();
                f.write_all(&bytes)?;
                f.flush()?;
                Ok((i, row, elapsed))
            })
            .collect()
    };
    let fresh = match opts.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::Resource(e.to_string()))?
            .install(run)?,
        None => run()?,
    };
    let computed = fresh.len();
    let mut timings: Vec<(usize, f64)> = Vec::with_capacity(computed);
    for (i, row, elapsed) in fresh {
        timings.push((i, elapsed));
        done.insert(i, row);
    }
    let rows: Vec<ScanRow> = done.into_values().collect();
    write_rows(&results, &rows)?;

    timings.sort_by_key(|t| t.0);
    let mut tf = String::from("point_id,N,seed,runtime_s\n");
    for (i, t) in timings {
        let j = &jobs[i];
        tf.push_str(&format!("{},{},{},{t}\n", cfg.points[j.point].id, j.n, j.seed));
    }
    fs::write(out_dir.join("timings.csv"), tf)?;

    let fits = point_fits(cfg, &rows);
    fs::write(out_dir.join("fits.json"), serde_json::to_string_pretty(&fits)?)?;
    fs::write(out_dir.join("plot.svg"), scan_svg(&rows, &fits))?;
    Ok(ScanSummary { results, rows, computed, skipped, fits })
}

pub fn point_fits(cfg: &ScanConfig, rows: &[ScanRow]) -> Vec<PointFit> {
    cfg.points
        .iter()
        .map(|p| {
            let data: Vec<(usize, f64)> = rows
                .iter()
                .filter(|r| r.point_id == p.id)
                .filter_map(|r| r.tmix.map(|t| (r.n, t as f64)))
                .collect();
            let prediction = phase_predict(p.alpha, p.tau.unwrap_or(f64::INFINITY)).ok();
            match fit_exponent(&data) {
                Ok(fit) => PointFit { point_id: p.id.clone(), prediction, fit: Some(fit), fit_error: None },
                Err(e) => PointFit { point_id: p.id.clone(), prediction, fit: None, fit_error: Some(e.to_string()) },
            }
        })
        .collect()
}
