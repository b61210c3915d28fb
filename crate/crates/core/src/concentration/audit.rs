use super::bounds::{bernstein_bound, fuk_nagaev_bound, wilson_interval, Z99};
use crate::cheeger::build_slices;
use crate::error::{Error, Result};
use crate::graph_model::{pareto_quantile, PhaseParams, WeightVector};
use crate::rng::{Purpose, RngStream};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize)]
pub struct TailRow {
    /// Deviation threshold.
    pub u: f64,
    /// Truncation level, for the Fuk-Nagaev event.
    pub y: Option<f64>,
    pub exceedances: u64,
    pub frequency: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub bound: f64,
    pub violation: bool,
}

/// Empirical exceedance frequencies against an evaluated bound. A row is a
/// violation only when the bound lies below the lower Wilson limit.
#[derive(Clone, Debug, Serialize)]
pub struct TailComparison {
    pub label: String,
    pub trials: u64,
    pub z: f64,
    pub rows: Vec<TailRow>,
    pub violations: usize,
}

impl TailComparison {
    fn new(label: impl Into<String>, trials: u64) -> Self {
        TailComparison { label: label.into(), trials, z: Z99, rows: Vec::new(), violations: 0 }
    }

    fn push(&mut self, u: f64, y: Option<f64>, exceedances: u64, bound: f64) {
        let (ci_low, ci_high) = wilson_interval(exceedances, self.trials, self.z);
        let violation = bound < ci_low;
        self.violations += violation as usize;
        self.rows.push(TailRow {
            u,
            y,
            exceedances,
            frequency: exceedances as f64 / self.trials as f64,
            ci_low,
            ci_high,
            bound,
            violation,
        });
    }

    pub fn passes(&self) -> bool {
        self.violations == 0
    }
}

/// P(sum of n centred +-1 coins >= u) against the Bernstein bound with
/// sigma^2 = 1, m = 1.
pub fn bernstein_coin_audit(n: usize, us: &[f64], trials: u64, seed: u64) -> Result<TailComparison> {
    if n == 0 || trials == 0 {
        return Err(Error::param("n", "need at least one coin and one trial"));
    }
    let bounds = us.iter().map(|&u| bernstein_bound(u, n, 1.0, 1.0)).collect::<Result<Vec<f64>>>()?;
    let s = RngStream::new(seed).purpose(Purpose::Audit).index(1);
    let words = n / 64;
    let rest = n % 64;
    let sums: Vec<i64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let st = s.index(t);
            let mut ones = 0u64;
            for k in 0..words {
                ones += st.bits_at(k as u64).count_ones() as u64;
            }
            if rest > 0 {
                ones += (st.bits_at(words as u64) & ((1u64 << rest) - 1)).count_ones() as u64;
            }
            2 * ones as i64 - n as i64
        })
        .collect();
    let mut cmp = TailComparison::new(format!("bernstein coins n={n}"), trials);
    for (&u, &b) in us.iter().zip(&bounds) {
        let k = sums.iter().filter(|&&x| x as f64 >= u).count() as u64;
        cmp.push(u, None, k, b);
    }
    Ok(cmp)
}

/// Draws of (S_n - n mu, M_n) for X = U^{-1/gamma}, so P(X > t) = t^{-gamma}.
pub fn pareto_sum_draws(n: usize, gamma: f64, trials: u64, seed: u64, stream: u64) -> Vec<(f64, f64)> {
    let mu = gamma / (gamma - 1.0);
    let s = RngStream::new(seed).purpose(Purpose::Audit).index(2).index(stream);
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let st = s.index(t);
            let (mut sum, mut max) = (0.0f64, 0.0f64);
            for i in 0..n {
                // 1 - u lies in (0, 1]
                let x = (1.0 - st.uniform_at(i as u64)).powf(-1.0 / gamma);
                sum += x;
                max = max.max(x);
            }
            (sum - n as f64 * mu, max)
        })
        .collect()
}

fn count_event(draws: &[(f64, f64)], x: f64, y: f64) -> u64 {
    draws.iter().filter(|&&(d, m)| d >= x && m <= y).count() as u64
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FukNagaevConfig {
    pub n: usize,
    pub gamma: f64,
    pub trials: u64,
    pub seed: u64,
    pub train: Vec<(f64, f64)>,
    pub validate: Vec<(f64, f64)>,
    /// Fixed constant reported alongside the calibrated one.
    pub reference_c: f64,
}

impl Default for FukNagaevConfig {
    fn default() -> Self {
        let grid = |ys: &[f64], ms: &[f64]| ys.iter().flat_map(|&y| ms.iter().map(move |&m| (m * y, y))).collect();
        FukNagaevConfig {
            n: 1000,
            gamma: 1.5,
            trials: 100_000,
            seed: 1,
            train: grid(&[100.0, 200.0, 400.0, 800.0], &[1.0, 2.0, 4.0]),
            validate: grid(&[150.0, 300.0, 600.0], &[1.5, 3.0]),
            reference_c: 2.0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FukNagaevAudit {
    /// Smallest c for which the bound covers the upper Wilson limit at every
    /// training point.
    pub calibrated_c: f64,
    pub train: TailComparison,
    pub validate: TailComparison,
    pub reference: TailComparison,
}

impl FukNagaevAudit {
    pub fn passes(&self) -> bool {
        self.train.passes() && self.validate.passes()
    }
}

/// Calibrates c on the training grid and checks it on the disjoint
/// validation grid, using fresh draws for each.
pub fn fuk_nagaev_audit(cfg: &FukNagaevConfig) -> Result<FukNagaevAudit> {
    let (n, gamma) = (cfg.n, cfg.gamma);
    if !(gamma > 1.0) {
        return Err(Error::param("gamma", "must exceed 1"));
    }
    if cfg.trials == 0 || cfg.train.is_empty() || cfg.validate.is_empty() {
        return Err(Error::param("trials", "need trials and non-empty grids"));
    }
    if let Some(p) = cfg.train.iter().find(|p| cfg.validate.contains(p)) {
        return Err(Error::param("validate", format!("grid point {p:?} also in the training grid")));
    }
    for &(x, y) in cfg.train.iter().chain(&cfg.validate) {
        fuk_nagaev_bound(n, gamma, x, y, 1.0)?;
    }
    let train_draws = pareto_sum_draws(n, gamma, cfg.trials, cfg.seed, 0);
    let mut c = 0.0f64;
    let mut train_counts = Vec::new();
    for &(x, y) in &cfg.train {
        let k = count_event(&train_draws, x, y);
        let (_, hi) = wilson_interval(k, cfg.trials, Z99);
        // (c n y^{1-gamma} / x)^{x/y} >= hi  <=>  c >= x hi^{y/x} / (n y^{1-gamma})
        c = c.max(x * hi.powf(y / x) / (n as f64 * y.powf(1.0 - gamma)));
        train_counts.push(k);
    }
    // guard against the bound landing one ulp below the target
    let c = c * (1.0 + 1e-12);
    let mut train = TailComparison::new(format!("fuk-nagaev train n={n} gamma={gamma}"), cfg.trials);
    for (&(x, y), &k) in cfg.train.iter().zip(&train_counts) {
        train.push(x, Some(y), k, fuk_nagaev_bound(n, gamma, x, y, c)?);
    }
    let val_draws = pareto_sum_draws(n, gamma, cfg.trials, cfg.seed, 1);
    let mut validate = TailComparison::new(format!("fuk-nagaev validate c={c:.4}"), cfg.trials);
    let mut reference = TailComparison::new(format!("fuk-nagaev c={}", cfg.reference_c), cfg.trials);
    for &(x, y) in &cfg.validate {
        let k = count_event(&val_draws, x, y);
        validate.push(x, Some(y), k, fuk_nagaev_bound(n, gamma, x, y, c)?);
        reference.push(x, Some(y), k, fuk_nagaev_bound(n, gamma, x, y, cfg.reference_c)?);
    }
    Ok(FukNagaevAudit { calibrated_c: c, train, validate, reference })
}

/// A family of independent non-negative summands Z_{N,x} <= A_N, possibly
/// several families sharing the same randomness.
pub trait SummandFamily: Sync {
    fn n(&self) -> usize;
    fn components(&self) -> Vec<Component>;
    /// Writes one draw of every component's sum Z_N into `out`.
    fn sample(&self, stream: &RngStream, out: &mut [f64]);
}

#[derive(Clone, Debug, Serialize)]
pub struct Component {
    pub label: String,
    /// A_N
    pub cap: f64,
    /// sum_x E[Z_{N,x}^2]
    pub second_moment: f64,
    /// E[Z_N]
    pub mean: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentAudit {
    pub component: Component,
    /// U_N = sqrt(sum E Z^2) ln N
    pub u_n: f64,
    pub condition_holds: bool,
    pub diagnostic: Option<String>,
    pub comparison: Option<TailComparison>,
    /// The c in the reference bound 2 exp(-c (ln N)^2) at u = U_N.
    pub reference_c: f64,
    /// Largest c with exp(-c (ln N)^2) above the upper Wilson limit at u = U_N.
    pub fitted_c: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConcentrationReport {
    pub n: usize,
    pub trials: u64,
    pub components: Vec<ComponentAudit>,
}

impl ConcentrationReport {
    pub fn audited(&self) -> usize {
        self.components.iter().filter(|c| c.comparison.is_some()).count()
    }

    pub fn violations(&self) -> usize {
        self.components.iter().filter_map(|c| c.comparison.as_ref()).map(|c| c.violations).sum()
    }
}

/// Frequency of |Z_N - E Z_N| > s U_N for each s in `u_schedule`, against
/// twice the Bernstein bound with variance proxy sum E Z^2 and summand bound
/// A_N. Components failing sum E Z^2 >= A_N^2 (ln N)^2 are skipped.
pub fn concentration_audit<F: SummandFamily>(
    family: &F,
    u_schedule: &[f64],
    trials: u64,
    seed: u64,
) -> Result<ConcentrationReport> {
    if u_schedule.is_empty() || u_schedule.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::param("u_schedule", "need positive multipliers of U_N"));
    }
    if trials == 0 {
        return Err(Error::param("trials", "must be positive"));
    }
    let n = family.n();
    let ln = (n as f64).ln();
    let comps = family.components();
    let s = RngStream::new(seed).purpose(Purpose::Audit).index(3);
    let draws: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut out = vec![0.0; comps.len()];
            family.sample(&s.index(t), &mut out);
            out
        })
        .collect();
    let mut out = Vec::with_capacity(comps.len());
    for (i, comp) in comps.into_iter().enumerate() {
        let u_n = comp.second_moment.sqrt() * ln;
        let need = comp.cap * comp.cap * ln * ln;
        let condition_holds = comp.second_moment >= need;
        if !condition_holds {
            out.push(ComponentAudit {
                diagnostic: Some(format!(
                    "second-moment condition fails: sum E[Z^2] = {:.4e} < A^2 (ln N)^2 = {need:.4e}",
                    comp.second_moment
                )),
                component: comp,
                u_n,
                condition_holds,
                comparison: None,
                reference_c: 0.375,
                fitted_c: None,
            });
            continue;
        }
        let mut cmp = TailComparison::new(comp.label.clone(), trials);
        let mut fitted_c = None;
        for &m in u_schedule {
            let u = m * u_n;
            let k = draws.iter().filter(|d| (d[i] - comp.mean).abs() > u).count() as u64;
            let bound = if u > 0.0 {
                (2.0 * bernstein_bound(u, 1, comp.second_moment, comp.cap.max(f64::MIN_POSITIVE))?).min(1.0)
            } else {
                // deterministic zero summands: no deviation is possible
                1.0
            };
            cmp.push(u, None, k, bound);
            if m == 1.0 {
                let hi = cmp.rows.last().unwrap().ci_high;
                fitted_c = Some(-hi.ln() / (ln * ln));
            }
        }
        out.push(ComponentAudit {
            component: comp,
            u_n,
            condition_holds,
            diagnostic: None,
            comparison: Some(cmp),
            reference_c: 0.375,
            fitted_c,
        });
    }
    Ok(ConcentrationReport { n, trials, components: out })
}

/// E[g(W)] for a Pareto weight with P(W >= w) = w^{-(tau-1)}, by Simpson's
/// rule in t = ln w.
pub fn pareto_expectation<G: Fn(f64) -> f64>(tau: f64, g: G, steps: usize) -> f64 {
    let a = tau - 1.0;
    let t_max = 40.0 / a;
    let steps = steps + steps % 2;
    let h = t_max / steps as f64;
    let f = |t: f64| g(t.exp()) * a * (-a * t).exp();
    let mut acc = f(0.0) + f(t_max);
    for i in 1..steps {
        acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

/// Degree of a fixed vertex with weight `w` on the torus: independent
/// indicators of {0 ~ y}, each bounded by A_N = 1.
#[derive(Clone, Debug)]
pub struct DegreeGivenWeight {
    pub params: PhaseParams<f64>,
    pub n: usize,
    pub weights: Vec<f64>,
    /// P(0 ~ y | W_0 = w) per torus distance, one row per weight.
    link: Vec<Vec<f64>>,
}

impl DegreeGivenWeight {
    pub fn new(params: PhaseParams<f64>, n: usize, weights: Vec<f64>) -> Result<Self> {
        if n < 3 {
            return Err(Error::param("n", "torus needs N >= 3"));
        }
        if weights.iter().any(|&w| !(w >= 1.0)) {
            return Err(Error::param("weights", "must be >= 1"));
        }
        let half = n / 2;
        let link = weights
            .iter()
            .map(|&w| {
                (0..=half)
                    .into_par_iter()
                    .map(|d| match d {
                        0 => 0.0,
                        1 => 1.0,
                        _ => {
                            let scale = w * (d as f64).powf(-params.alpha);
                            pareto_expectation(params.tau, |v| -(-scale * v).exp_m1(), 4000)
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(DegreeGivenWeight { params, n, weights, link })
    }

    fn dist(&self, y: usize) -> usize {
        y.min(self.n - y)
    }
}

impl SummandFamily for DegreeGivenWeight {
    fn n(&self) -> usize {
        self.n
    }

    fn components(&self) -> Vec<Component> {
        self.weights
            .iter()
            .zip(&self.link)
            .map(|(w, p)| {
                let mean: f64 = (1..self.n).map(|y| p[self.dist(y)]).sum();
                Component { label: format!("degree | W = {w}"), cap: 1.0, second_moment: mean, mean }
            })
            .collect()
    }

    fn sample(&self, stream: &RngStream, out: &mut [f64]) {
        let (alpha, tau) = (self.params.alpha, self.params.tau);
        for (k, &w) in self.weights.iter().enumerate() {
            let st = stream.index(k as u64);
            let mut deg = 0u64;
            for y in 1..self.n {
                let d = self.dist(y);
                if d == 1 {
                    deg += 1;
                    continue;
                }
                let wy = pareto_quantile(st.uniform_at(2 * y as u64), tau);
                let lam = w * wy * (d as f64).powf(-alpha);
                let u = st.uniform_at(2 * y as u64 + 1);
                deg += (u < lam && u < -(-lam).exp_m1()) as u64;
            }
            out[k] = deg as f64;
        }
    }
}

/// Cardinalities of the weight slices, all from one weight draw per trial.
#[derive(Clone, Debug)]
pub struct SliceCounts {
    pub params: PhaseParams<f64>,
    pub n: usize,
    pub slices: Vec<(String, f64, f64)>,
}

impl SliceCounts {
    pub fn new(params: PhaseParams<f64>, n: usize) -> Result<Self> {
        let family = build_slices(&WeightVector::ones(n), &params)?;
        let slices = family.slices.iter().map(|s| (s.label(), s.lo, s.hi)).collect();
        Ok(SliceCounts { params, n, slices })
    }

    fn prob(&self, lo: f64, hi: f64) -> f64 {
        let a = self.params.tau - 1.0;
        let tail = |w: f64| if w <= 1.0 { 1.0 } else { w.powf(-a) };
        (tail(lo) - tail(hi)).max(0.0)
    }
}

impl SummandFamily for SliceCounts {
    fn n(&self) -> usize {
        self.n
    }

    fn components(&self) -> Vec<Component> {
        self.slices
            .iter()
            .map(|(label, lo, hi)| {
                let mean = self.n as f64 * self.prob(*lo, *hi);
                Component { label: format!("|{label}|"), cap: 1.0, second_moment: mean, mean }
            })
            .collect()
    }

    fn sample(&self, stream: &RngStream, out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for x in 0..self.n {
            let w = pareto_quantile(stream.uniform_at(x as u64), self.params.tau);
            for (k, (_, lo, hi)) in self.slices.iter().enumerate() {
                if w >= *lo && w < *hi {
                    out[k] += 1.0;
                }
            }
        }
    }
}

/// Non-random summands; the sum never deviates from its mean.
#[derive(Clone, Debug)]
pub struct Deterministic {
    pub values: Vec<f64>,
}

impl SummandFamily for Deterministic {
    fn n(&self) -> usize {
        self.values.len()
    }

    fn components(&self) -> Vec<Component> {
        vec![Component {
            label: "deterministic".into(),
            cap: self.values.iter().cloned().fold(0.0, f64::max),
            second_moment: self.values.iter().map(|v| v * v).sum(),
            mean: self.values.iter().sum(),
        }]
    }

    fn sample(&self, _stream: &RngStream, out: &mut [f64]) {
        out[0] = self.values.iter().sum();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pareto_expectation_matches_closed_forms() {
        // E[W] = (tau - 1) / (tau - 2)
        let m = pareto_expectation(3.5, |w| w, 4000);
        assert!((m - 2.5 / 1.5).abs() < 1e-8, "{m}");
        let p = pareto_expectation(2.5, |w| (w >= 4.0) as u8 as f64, 40_000);
        assert!((p - 4f64.powf(-1.5)).abs() < 1e-3);
    }

    #[test]
    fn coin_audit_small() {
        let cmp = bernstein_coin_audit(1000, &[30.0, 60.0, 90.0], 20_000, 3).unwrap();
        assert!(cmp.passes());
        // P(S >= 30) for 1000 fair coins is about 0.17
        assert!((cmp.rows[0].frequency - 0.17).abs() < 0.02, "{}", cmp.rows[0].frequency);
    }

    #[test]
    fn deterministic_family_has_no_deviation() {
        let fam = Deterministic { values: vec![0.001; 10_000] };
        let rep = concentration_audit(&fam, &[1.0], 50, 1).unwrap();
        let c = &rep.components[0];
        assert!(c.condition_holds);
        assert_eq!(c.comparison.as_ref().unwrap().rows[0].exceedances, 0);
        assert_eq!(rep.violations(), 0);
    }

    #[test]
    fn failing_condition_is_skipped() {
        let mut values = vec![0.0; 10];
        values[0] = 5.0;
        let fam = Deterministic { values };
        let rep = concentration_audit(&fam, &[1.0], 5, 1).unwrap();
        assert!(rep.components[0].comparison.is_none());
        assert!(rep.components[0].diagnostic.as_ref().unwrap().contains("second-moment"));
    }

    #[test]
    fn degree_mean_matches_simulation() {
        let p = PhaseParams::new(0.6, 2.5).unwrap();
        let fam = DegreeGivenWeight::new(p, 2000, vec![1.0]).unwrap();
        let mean = fam.components()[0].mean;
        let s = RngStream::new(9);
        let trials = 400;
        let mut acc = 0.0;
        let mut out = [0.0];
        for t in 0..trials {
            fam.sample(&s.index(t), &mut out);
            acc += out[0];
        }
        let emp = acc / trials as f64;
        assert!((emp - mean).abs() < 0.02 * mean, "{emp} vs {mean}");
    }
}
