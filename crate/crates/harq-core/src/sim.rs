//! Monte Carlo of the HARQ protocol and of the slotted transmit queue.
//!
//! Trials are split into fixed batches, each with its own generator stream,
//! and batch sums are folded in batch order. Results therefore depend on the
//! seed only, never on the worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::channel::{draw_round, BaselinePower, LinkProfile, LinkStreams, ScenarioParams};
use crate::error::{Error, Result};

/// Trials per generator stream.
pub const BATCH: u64 = 10_000;

/// Which relayed SNR the simulated destination accumulates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SrdModel {
    /// `γ_SR γ_RD / (1 + γ_SR + γ_RD)`, the true amplify-and-forward SNR.
    Exact,
    /// `min(γ_SR, γ_RD)`, the model the closed forms are built on.
    #[default]
    MinBound,
}

/// Result of sending one packet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarqOutcome {
    pub rounds_used: usize,
    pub success: bool,
    /// Accumulated mutual information in bits when the packet stopped.
    pub mutual_info: f64,
}

/// Sends one packet: rounds continue until `Σ log2(1 + γ_l) ≥ R₁` or `M`
/// rounds have been spent. Parameters are taken as given (a zero rate
/// succeeds in the first round).
pub fn simulate_packet(params: &ScenarioParams, streams: &mut LinkStreams, model: SrdModel) -> HarqOutcome {
    let mut mi = 0.0;
    for m in 1..=params.max_rounds {
        let d = draw_round(&params.profile, streams);
        let g = match model {
            SrdModel::Exact => d.g_total_exact,
            SrdModel::MinBound => d.g_total_bound,
        };
        mi += g.ln_1p() / std::f64::consts::LN_2;
        if mi >= params.rate_r1 {
            return HarqOutcome { rounds_used: m, success: true, mutual_info: mi };
        }
    }
    HarqOutcome { rounds_used: params.max_rounds, success: false, mutual_info: mi }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    fn merge(mut self, o: Moments) -> Moments {
        self.n += o.n;
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
        self
    }

    fn estimate(&self) -> McEstimate {
        let n = self.n as f64;
        let mean = self.sum / n;
        let var = if self.n > 1 { ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
        McEstimate { mean, std_error: (var / n).sqrt(), trials: self.n }
    }
}

/// Monte Carlo budget and reproducibility controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl McConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self { trials, seed, workers: None }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be >= 1".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidParameter("workers must be >= 1".into()));
        }
        Ok(())
    }
}

/// Runs `job(batch_index, count)` for every batch and returns results in
/// batch order.
fn run_indexed<T, F>(count: u64, workers: Option<usize>, job: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let run = || (0..count).into_par_iter().map(&job).collect::<Vec<_>>();
        match workers {
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
                Ok(pool.install(run))
            }
            None => Ok(run()),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = workers;
        Ok((0..count).map(job).collect())
    }
}

fn run_batches<F>(cfg: &McConfig, per_trial: F) -> Result<Vec<Moments>>
where
    F: Fn(&mut LinkStreams, &mut [Moments]) + Sync + Send,
{
    cfg.validate()?;
    let batches = cfg.trials.div_ceil(BATCH);
    let trials = cfg.trials;
    let seed = cfg.seed;
    let parts = run_indexed(batches, cfg.workers, |b| {
        let n = BATCH.min(trials - b * BATCH);
        let mut streams = LinkStreams::new(seed, b);
        let mut acc = [Moments::default(); 2];
        for _ in 0..n {
            per_trial(&mut streams, &mut acc);
        }
        acc
    })?;
    let mut total = [Moments::default(); 2];
    for p in parts {
        total[0] = total[0].merge(p[0]);
        total[1] = total[1].merge(p[1]);
    }
    Ok(total.to_vec())
}

/// Fraction of packets that fail after `M` rounds.
pub fn estimate_outage(params: &ScenarioParams, cfg: &McConfig, model: SrdModel) -> Result<McEstimate> {
    params.validate()?;
    let acc = run_batches(cfg, |s, acc| {
        let o = simulate_packet(params, s, model);
        acc[0].push(if o.success { 0.0 } else { 1.0 });
    })?;
    Ok(acc[0].estimate())
}

/// First and second moments of the rounds spent per packet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundMoments {
    pub avg_tx: McEstimate,
    pub e_tr2: McEstimate,
}

pub fn estimate_moments(params: &ScenarioParams, cfg: &McConfig, model: SrdModel) -> Result<RoundMoments> {
    params.validate()?;
    let acc = run_batches(cfg, |s, acc| {
        let r = simulate_packet(params, s, model).rounds_used as f64;
        acc[0].push(r);
        acc[1].push(r * r);
    })?;
    Ok(RoundMoments { avg_tx: acc[0].estimate(), e_tr2: acc[1].estimate() })
}

/// Product whose distribution is estimated by [`estimate_product_cdf`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductKind {
    /// `Π (1 + γ_l)`.
    Shifted,
    /// `Π γ_l`.
    Plain,
}

/// `Pr[product of m rounds ≤ x]` with rounds from the min-bound law.
pub fn estimate_product_cdf(
    profile: &LinkProfile,
    m: usize,
    x: f64,
    kind: ProductKind,
    cfg: &McConfig,
) -> Result<McEstimate> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be >= 1".into()));
    }
    let acc = run_batches(cfg, |s, acc| {
        let mut p = 1.0;
        for _ in 0..m {
            let g = draw_round(profile, s).g_total_bound;
            p *= match kind {
                ProductKind::Shifted => 1.0 + g,
                ProductKind::Plain => g,
            };
        }
        acc[0].push(if p <= x { 1.0 } else { 0.0 });
    })?;
    Ok(acc[0].estimate())
}

/// Outage after `m` rounds over the direct link alone.
pub fn estimate_no_relay_outage(
    profile: &LinkProfile,
    m: usize,
    r1: f64,
    baseline: BaselinePower,
    cfg: &McConfig,
) -> Result<McEstimate> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be >= 1".into()));
    }
    let mean = baseline.direct_mean(profile);
    let acc = run_batches(cfg, |s, acc| {
        let mut mi = 0.0;
        for _ in 0..m {
            let e: f64 = Exp1.sample(&mut s.sd);
            mi += (e * mean).ln_1p() / std::f64::consts::LN_2;
        }
        acc[0].push(if mi < r1 { 1.0 } else { 0.0 });
    })?;
    Ok(acc[0].estimate())
}

/// Per-packet timeline of one queue replication.
#[derive(Debug, Clone, PartialEq)]
pub struct QueueTrace {
    pub arrival: Vec<f64>,
    pub start: Vec<f64>,
    pub departure: Vec<f64>,
    pub rounds: Vec<usize>,
    pub mean_wait: f64,
    pub mean_sojourn: f64,
}

/// Poisson arrivals into a FIFO buffer served in whole frames: a packet
/// starts at the first frame boundary after both its arrival and the
/// previous departure, and holds the channel for `rounds · T_F`.
pub fn simulate_queue(params: &ScenarioParams, packets: usize, seed: u64, model: SrdModel) -> Result<QueueTrace> {
    simulate_replication(params, packets, seed, 0, model)
}

fn simulate_replication(
    params: &ScenarioParams,
    packets: usize,
    seed: u64,
    rep: u64,
    model: SrdModel,
) -> Result<QueueTrace> {
    params.validate()?;
    if params.arrival_rate <= 0.0 {
        return Err(Error::InvalidParameter("arrival_rate must be > 0 for queue simulation".into()));
    }
    if packets == 0 {
        return Err(Error::InvalidParameter("packets must be >= 1".into()));
    }
    let tf = params.frame_time;
    let mut streams = LinkStreams::new(seed, rep);
    let rounds: Vec<usize> = (0..packets).map(|_| simulate_packet(params, &mut streams, model).rounds_used).collect();
    let mean_rounds = rounds.iter().sum::<usize>() as f64 / packets as f64;
    let rho = params.arrival_rate * mean_rounds * tf;
    if rho >= 1.0 {
        return Err(Error::Unstable { rho });
    }

    let mut arr_rng = ChaCha8Rng::seed_from_u64(seed);
    arr_rng.set_stream(u64::MAX - rep);
    let mut arrival = Vec::with_capacity(packets);
    let mut start = Vec::with_capacity(packets);
    let mut departure = Vec::with_capacity(packets);
    let (mut t, mut free) = (0.0f64, 0.0f64);
    let (mut wait_sum, mut soj_sum) = (0.0, 0.0);
    for &r in &rounds {
        let e: f64 = Exp1.sample(&mut arr_rng);
        t += e / params.arrival_rate;
        let s = ((t / tf).ceil() * tf).max(free);
        let d = s + r as f64 * tf;
        wait_sum += s - t;
        soj_sum += d - t;
        arrival.push(t);
        start.push(s);
        departure.push(d);
        free = d;
    }
    Ok(QueueTrace {
        arrival,
        start,
        departure,
        rounds,
        mean_wait: wait_sum / packets as f64,
        mean_sojourn: soj_sum / packets as f64,
    })
}

/// Independent replications, returned in replication order.
pub fn simulate_queue_replications(
    params: &ScenarioParams,
    packets: usize,
    replications: usize,
    seed: u64,
    model: SrdModel,
    workers: Option<usize>,
) -> Result<Vec<QueueTrace>> {
    if replications == 0 {
        return Err(Error::InvalidParameter("replications must be >= 1".into()));
    }
    run_indexed(replications as u64, workers, |r| simulate_replication(params, packets, seed, r, model))?
        .into_iter()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(snr: f64) -> ScenarioParams {
        ScenarioParams::new(LinkProfile::reference(snr).unwrap(), 2.0, 4, 0.5, 0.2).unwrap()
    }

    #[test]
    fn zero_trials_rejected() {
        let r = estimate_outage(&params(5.0), &McConfig::new(0, 1), SrdModel::MinBound);
        assert!(matches!(r, Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn zero_rate_succeeds_first_round() {
        let mut p = params(0.0);
        p.rate_r1 = 0.0;
        let mut s = LinkStreams::new(3, 0);
        let o = simulate_packet(&p, &mut s, SrdModel::Exact);
        assert!(o.success);
        assert_eq!(o.rounds_used, 1);
    }

    #[test]
    fn deterministic_and_worker_independent() {
        let p = params(6.0);
        let cfg = McConfig::new(25_000, 42);
        let a = estimate_outage(&p, &cfg.with_workers(1), SrdModel::MinBound).unwrap();
        let b = estimate_outage(&p, &cfg.with_workers(3), SrdModel::MinBound).unwrap();
        let c = estimate_outage(&p, &cfg, SrdModel::MinBound).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(a.trials, 25_000);
    }

    #[test]
    fn exact_srd_never_beats_min_bound() {
        // γ_SR γ_RD/(1+γ_SR+γ_RD) < min(γ_SR, γ_RD) pointwise, and both models
        // consume identical draws.
        let p = params(4.0);
        let cfg = McConfig::new(20_000, 7);
        let e = estimate_outage(&p, &cfg, SrdModel::Exact).unwrap();
        let b = estimate_outage(&p, &cfg, SrdModel::MinBound).unwrap();
        assert!(e.mean >= b.mean);
    }

    #[test]
    fn moments_are_consistent() {
        let m = estimate_moments(&params(3.0), &McConfig::new(20_000, 9), SrdModel::MinBound).unwrap();
        assert!(m.avg_tx.mean >= 1.0 && m.avg_tx.mean <= 4.0);
        assert!(m.e_tr2.mean >= m.avg_tx.mean * m.avg_tx.mean);
    }

    #[test]
    fn queue_invariants() {
        let q = simulate_queue(&params(10.0), 5_000, 11, SrdModel::MinBound).unwrap();
        for i in 0..q.arrival.len() {
            assert!(q.start[i] >= q.arrival[i]);
            assert!((q.start[i] / 0.5 - (q.start[i] / 0.5).round()).abs() < 1e-9);
            if i > 0 {
                assert!(q.start[i] >= q.departure[i - 1]);
            }
        }
        assert!(q.mean_sojourn > q.mean_wait);
    }

    #[test]
    fn queue_rejects_bad_inputs() {
        let mut p = params(10.0);
        p.arrival_rate = 0.0;
        assert!(matches!(simulate_queue(&p, 10, 1, SrdModel::MinBound), Err(Error::InvalidParameter(_))));
        p.arrival_rate = 10.0;
        assert!(matches!(simulate_queue(&p, 1000, 1, SrdModel::MinBound), Err(Error::Unstable { .. })));
    }
}
