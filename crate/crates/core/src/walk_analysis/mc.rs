use super::kernel::stationary;
use super::spectral::{spectral_bounds, spectral_gap_with, SpectralOptions};
use super::{Method, MixingEstimate};
use crate::error::{Error, Result};
use crate::graph_model::Graph;
use crate::rng::{Purpose, RngStream};
use rand::RngCore;
use std::time::Instant;

#[derive(Clone, Debug)]
pub struct McOptions {
    pub replicas: usize,
    pub threshold: f64,
    pub step_cap: u64,
    pub random_starts: usize,
    pub seed: u64,
    /// Failure probability of the per-step concentration margin behind `lower`.
    pub confidence: f64,
    pub spectral: SpectralOptions,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions {
            replicas: 2000,
            threshold: 0.25,
            step_cap: 50_000_000,
            random_starts: 8,
            seed: 0,
            confidence: 1e-6,
            spectral: SpectralOptions::default(),
        }
    }
}

#[inline]
fn lazy_step(graph: &Graph, x: u32, bits: u64) -> u32 {
    if bits & 1 == 0 {
        return x;
    }
    let nb = graph.neighbors(x as usize);
    let i = (((bits >> 1) as u128 * nb.len() as u128) >> 63) as usize;
    nb[i]
}

/// Monte Carlo estimate of t_mix from walkers started at the max-degree
/// vertex, the min-degree vertex and a few random vertices. Positions are
/// binned into ceil(sqrt N) arcs; the binned distance never exceeds the true
/// one, which gives the lower end of the bracket, while the upper end comes
/// from the relaxation-time bound.
pub fn mc_tmix(graph: &Graph, opts: &McOptions) -> Result<MixingEstimate> {
    let start_time = Instant::now();
    let n = graph.n();
    if opts.replicas == 0 {
        return Err(Error::param("replicas", "must be positive"));
    }
    let pi = stationary::<f64>(graph)?;
    let bins = ((n as f64).sqrt().ceil() as usize).max(1);
    let bin_of: Vec<u32> = (0..n).map(|x| (x * bins / n) as u32).collect();
    let mut pi_bin = vec![0.0; bins];
    for x in 0..n {
        pi_bin[bin_of[x] as usize] += pi.get(x);
    }
    let r = opts.replicas as f64;
    let bias: f64 = 0.5 * pi_bin.iter().map(|p| (p * (1.0 - p) / r).sqrt()).sum::<f64>();
    let margin = bias + ((1.0 / opts.confidence).ln() / (2.0 * r)).sqrt();

    let (gap, upper) = match spectral_gap_with::<f64>(graph, &opts.spectral) {
        Ok(g) => {
            let (_, hi) = spectral_bounds(g.gap, pi.min(), opts.threshold);
            (Some(g.gap), ((hi + 1e-9).floor() as u64).min(opts.step_cap))
        }
        Err(_) => (None, opts.step_cap),
    };

    let degrees = graph.degrees();
    let argmax = (0..n).max_by(|&a, &b| degrees[a].cmp(&degrees[b]).then(b.cmp(&a))).unwrap();
    let argmin = (0..n).min_by(|&a, &b| degrees[a].cmp(&degrees[b]).then(a.cmp(&b))).unwrap();
    let root = RngStream::new(opts.seed);
    let start_stream = root.purpose(Purpose::Start);
    let mut starts = vec![argmax as u32, argmin as u32];
    for i in 0..opts.random_starts {
        starts.push((start_stream.bits_at(i as u64) % n as u64) as u32);
    }
    let walk = root.purpose(Purpose::Walk);
    let mut rngs: Vec<_> = (0..starts.len()).map(|s| walk.index(s as u64).sequential()).collect();
    let mut pos: Vec<Vec<u32>> = starts.iter().map(|&s| vec![s; opts.replicas]).collect();
    let mut counts = vec![0u32; bins];

    let mut last_exceed = 0u64;
    let mut value = None;
    let mut step = 0u64;
    while step < upper {
        step += 1;
        let mut worst = 0.0f64;
        for (s, walkers) in pos.iter_mut().enumerate() {
            counts.iter_mut().for_each(|c| *c = 0);
            let rng = &mut rngs[s];
            for w in walkers.iter_mut() {
                *w = lazy_step(graph, *w, rng.next_u64());
                counts[bin_of[*w as usize] as usize] += 1;
            }
            let tv = 0.5 * counts.iter().zip(&pi_bin).map(|(&c, p)| (c as f64 / r - p).abs()).sum::<f64>();
            worst = worst.max(tv);
        }
        if worst - margin >= opts.threshold {
            last_exceed = step;
        }
        if worst < opts.threshold - 2.0 * bias {
            value = Some(step);
            break;
        }
    }
    let lower = (last_exceed + 1).min(upper.max(1));
    let resolved = value.is_some() || gap.is_some();
    let value = value.unwrap_or(upper).clamp(lower, upper.max(lower));
    Ok(MixingEstimate {
        value,
        method: Method::Mc,
        lower,
        upper: upper.max(lower),
        threshold: opts.threshold,
        gap,
        resolved,
        runtime_s: start_time.elapsed().as_secs_f64(),
    })
}
