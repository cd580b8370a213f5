//! Outage, throughput, energy and delay metrics assembled from the
//! Fox H / Meijer G representations of `ξ_M = Π(1 + γ_l)` and `ζ_M = Π γ_l`.
//!
//! With `ū = γ̄_up`, `d̄ = γ̄_SD`, `A = 1/ū`, `B = 1/d̄` and `w_k = ū^k d̄^{M-k}`:
//!
//! ```text
//! F_ξ(x) = C^M Σ_k binom(M,k) (-1)^{M-k} w_k e^{kA+(M-k)B}
//!          H^{M,1}_{1,M+1}(x/w_k | (1,1,0); (1,1,A)^k, (1,1,B)^{M-k}, (0,1,0))
//! F_ζ(x) = C^M Σ_k binom(M,k) (-1)^{M-k} w_k G^{M,1}_{1,M+1}(x/w_k | 1; 1,…,1, 0)
//! ```
//!
//! Every term is combined in log-magnitude space; the large `e^{kA}` factors
//! cancel against the scale split off by the H evaluation.

use crate::channel::{BaselinePower, LinkProfile, ScenarioParams};
use crate::error::{Error, Result};
use crate::special::{fox_h_eval, meijer_g_eval, ContourConfig, FoxHSpec, FoxTriple, MeijerGSpec};

/// How far a raw probability may leave `[0, 1]` before it is a fault.
pub const CLAMP_SLACK: f64 = 1e-6;

/// Which outage expression feeds the derived metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OutageFamily {
    /// `P_out(m) = F_ξm(2^{R₁})`.
    Exact,
    /// `P̄_out(m) = F_ζm((2^{R₁/m} - 1)^m)`.
    Bound,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutageResult {
    pub exact: f64,
    pub bound: f64,
    /// `P_out(m)` for `m = 1..=M`.
    pub per_round_exact: Vec<f64>,
    pub per_round_bound: Vec<f64>,
}

/// Queueing delay; an unstable queue is a value, not a fault.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Delay {
    Stable(f64),
    Unstable { rho: f64 },
}

impl Delay {
    pub fn value(&self) -> Option<f64> {
        match self {
            Delay::Stable(v) => Some(*v),
            Delay::Unstable { .. } => None,
        }
    }

    pub fn is_stable(&self) -> bool {
        matches!(self, Delay::Stable(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedMetrics {
    /// `N̄ = E[T_r]`.
    pub avg_tx: f64,
    /// `E[T_r²]`.
    pub e_tr2: f64,
    /// `R̄ = R₁ / (2N̄)`.
    pub avg_rate: f64,
    /// `η_EE = R₁ / (N̄ P)`.
    pub energy_eff: f64,
    /// `ρ = λ N̄ T_F`.
    pub rho: f64,
    pub waiting: Delay,
    pub sojourn: Delay,
}

impl DerivedMetrics {
    /// Metrics from the per-round outage list `P(1..=M)`.
    pub fn from_outages(params: &ScenarioParams, per_round: &[f64]) -> Result<Self> {
        params.validate()?;
        if per_round.len() != params.max_rounds {
            return Err(Error::InvalidParameter(format!(
                "expected {} per-round outages, got {}",
                params.max_rounds,
                per_round.len()
            )));
        }
        let head = &per_round[..per_round.len() - 1];
        let avg_tx = 1.0 + head.iter().sum::<f64>();
        let e_tr2 = 1.0 + head.iter().enumerate().map(|(i, p)| (2 * (i + 1) + 1) as f64 * p).sum::<f64>();
        let avg_rate = params.rate_r1 / (2.0 * avg_tx);
        let energy_eff = params.rate_r1 / (avg_tx * params.profile.power());
        let tf = params.frame_time;
        let lambda = params.arrival_rate;
        let rho = lambda * avg_tx * tf;
        let (waiting, sojourn) = if rho >= 1.0 {
            (Delay::Unstable { rho }, Delay::Unstable { rho })
        } else {
            let w = lambda * e_tr2 * tf * tf / (2.0 * (1.0 - rho)) + tf / 2.0;
            (Delay::Stable(w), Delay::Stable(w + avg_tx * tf))
        };
        Ok(Self { avg_tx, e_tr2, avg_rate, energy_eff, rho, waiting, sojourn })
    }
}

/// One operating point evaluated with both outage families.
#[derive(Debug, Clone, PartialEq)]
pub struct PerfReport {
    pub outage: OutageResult,
    pub exact: DerivedMetrics,
    pub bound: DerivedMetrics,
}

impl PerfReport {
    pub fn metrics(&self, family: OutageFamily) -> &DerivedMetrics {
        match family {
            OutageFamily::Exact => &self.exact,
            OutageFamily::Bound => &self.bound,
        }
    }
}

/// Accumulates signed terms `± e^{ln_mag} · value` together with the
/// rounding floor each term carries.
#[derive(Default)]
struct SignedSum {
    sum: f64,
    noise: f64,
}

impl SignedSum {
    fn add(&mut self, negative: bool, ln_mag: f64, value: f64, noise: f64) {
        let mag = ln_mag.exp();
        let v = mag * value;
        self.sum += if negative { -v } else { v };
        self.noise += mag * noise;
    }
}

fn ln_binom(n: usize, k: usize) -> f64 {
    (1..=k).map(|i| ((n - k + i) as f64 / i as f64).ln()).sum()
}

/// Analytic evaluator; holds the contour settings shared by all metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluator {
    pub contour: ContourConfig,
    /// Largest accepted rounding floor of a binomial sum.
    pub noise_limit: f64,
}

impl Default for Evaluator {
    fn default() -> Self {
        Self { contour: ContourConfig::default(), noise_limit: 1e-8 }
    }
}

struct Means {
    up: f64,
    sd: f64,
    c: f64,
}

fn means(profile: &LinkProfile) -> Result<Means> {
    let c = profile.constant_c()?;
    Ok(Means { up: profile.eff_up(), sd: profile.eff_sd(), c })
}

fn check_rounds(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidParameter("number of rounds must be >= 1".into()));
    }
    Ok(())
}

impl Evaluator {
    pub fn new(contour: ContourConfig) -> Self {
        Self { contour, ..Self::default() }
    }

    /// CDF kernels are integrated in `h = s - 1`; a user abscissa is given
    /// in `s`.
    fn cdf_contour(&self) -> ContourConfig {
        ContourConfig { abscissa: self.contour.abscissa.map(|c| c - 1.0), ..self.contour }
    }

    fn finish_probability(&self, acc: SignedSum, what: &str) -> Result<f64> {
        if acc.noise > self.noise_limit {
            return Err(Error::NonConvergence(format!(
                "{what}: binomial cancellation leaves a rounding floor of {:e}",
                acc.noise
            )));
        }
        let raw = acc.sum;
        if !raw.is_finite() || !(-CLAMP_SLACK..=1.0 + CLAMP_SLACK).contains(&raw) {
            return Err(Error::NumericalInconsistency { context: what.into(), raw });
        }
        Ok(raw.clamp(0.0, 1.0))
    }

    fn finish_density(&self, acc: SignedSum, what: &str) -> Result<f64> {
        let raw = acc.sum;
        if !raw.is_finite() || raw < -CLAMP_SLACK.max(acc.noise) {
            return Err(Error::NumericalInconsistency { context: what.into(), raw });
        }
        Ok(raw.max(0.0))
    }

    /// `F_ξm(x) = Pr[Π_{l≤m} (1 + γ_l) ≤ x]`.
    pub fn cdf_xi(&self, profile: &LinkProfile, m: usize, x: f64) -> Result<f64> {
        check_rounds(m)?;
        let mm = means(profile)?;
        if x.is_nan() {
            return Err(Error::Domain("cdf_xi at NaN".into()));
        }
        if x <= 1.0 {
            return Ok(0.0);
        }
        if x == f64::INFINITY {
            return Ok(1.0);
        }
        let (a, b) = (1.0 / mm.up, 1.0 / mm.sd);
        let cfg = self.cdf_contour();
        let mut acc = SignedSum::default();
        for k in 0..=m {
            let mut lower = vec![FoxTriple::new(1.0, 1.0, a); k];
            lower.extend(std::iter::repeat_n(FoxTriple::new(1.0, 1.0, b), m - k));
            lower.push(FoxTriple::complete(0.0));
            let spec = FoxHSpec::new(m, 1, vec![FoxTriple::complete(1.0)], lower)?;
            let ln_w = k as f64 * mm.up.ln() + (m - k) as f64 * mm.sd.ln();
            let h = fox_h_eval(&spec, x.ln() - ln_w, &cfg)?;
            let ln_mag =
                m as f64 * mm.c.abs().ln() + ln_binom(m, k) + ln_w + k as f64 * a + (m - k) as f64 * b + h.log_scale;
            let negative = ((m - k) % 2 == 1) ^ (mm.c < 0.0 && m % 2 == 1);
            acc.add(negative, ln_mag, h.line.re, h.line.noise());
        }
        self.finish_probability(acc, "cdf_xi")
    }

    /// `Pr[Π_{l≤m} (1 + γ_l) ≤ x]` for i.i.d. exponential `γ_l` of the given
    /// mean: a single H term, `e^{mB} H^{m,1}_{1,m+1}(x/d̄^m | (1,1,0); (1,1,B)^m, (0,1,0))`.
    pub fn cdf_xi_exponential(&self, mean: f64, m: usize, x: f64) -> Result<f64> {
        check_rounds(m)?;
        if !(mean.is_finite() && mean > 0.0) {
            return Err(Error::InvalidParameter(format!("mean must be finite and > 0, got {mean}")));
        }
        if x.is_nan() {
            return Err(Error::Domain("cdf_xi_exponential at NaN".into()));
        }
        if x <= 1.0 {
            return Ok(0.0);
        }
        if x == f64::INFINITY {
            return Ok(1.0);
        }
        let b = 1.0 / mean;
        let mut lower = vec![FoxTriple::new(1.0, 1.0, b); m];
        lower.push(FoxTriple::complete(0.0));
        let spec = FoxHSpec::new(m, 1, vec![FoxTriple::complete(1.0)], lower)?;
        let h = fox_h_eval(&spec, x.ln() - m as f64 * mean.ln(), &self.cdf_contour())?;
        let mut acc = SignedSum::default();
        acc.add(false, m as f64 * b + h.log_scale, h.line.re, h.line.noise());
        self.finish_probability(acc, "cdf_xi_exponential")
    }

    /// Outage after `m` rounds of the direct-link-only scheme.
    pub fn outage_no_relay(&self, params: &ScenarioParams, m: usize, baseline: BaselinePower) -> Result<f64> {
        params.validate()?;
        self.cdf_xi_exponential(baseline.direct_mean(&params.profile), m, params.rate_r1.exp2())
    }

    /// Density of `ξ_m`.
    pub fn pdf_xi(&self, profile: &LinkProfile, m: usize, x: f64) -> Result<f64> {
        check_rounds(m)?;
        let mm = means(profile)?;
        if x.is_nan() {
            return Err(Error::Domain("pdf_xi at NaN".into()));
        }
        if x <= 1.0 || x == f64::INFINITY {
            return Ok(0.0);
        }
        let (a, b) = (1.0 / mm.up, 1.0 / mm.sd);
        let mut acc = SignedSum::default();
        for k in 0..=m {
            let mut lower = vec![FoxTriple::new(0.0, 1.0, a); k];
            lower.extend(std::iter::repeat_n(FoxTriple::new(0.0, 1.0, b), m - k));
            let spec = FoxHSpec::new(m, 0, vec![], lower)?;
            let ln_w = k as f64 * mm.up.ln() + (m - k) as f64 * mm.sd.ln();
            let h = fox_h_eval(&spec, x.ln() - ln_w, &self.contour)?;
            let ln_mag = m as f64 * mm.c.abs().ln() + ln_binom(m, k) + k as f64 * a + (m - k) as f64 * b + h.log_scale;
            let negative = ((m - k) % 2 == 1) ^ (mm.c < 0.0 && m % 2 == 1);
            acc.add(negative, ln_mag, h.line.re, h.line.noise());
        }
        self.finish_density(acc, "pdf_xi")
    }

    /// `F_ζm(x) = Pr[Π_{l≤m} γ_l ≤ x]`.
    pub fn cdf_zeta(&self, profile: &LinkProfile, m: usize, x: f64) -> Result<f64> {
        check_rounds(m)?;
        let mm = means(profile)?;
        if x.is_nan() {
            return Err(Error::Domain("cdf_zeta at NaN".into()));
        }
        if x <= 0.0 {
            return Ok(0.0);
        }
        if x == f64::INFINITY {
            return Ok(1.0);
        }
        let cfg = self.cdf_contour();
        let mut lower = vec![1.0; m];
        lower.push(0.0);
        let spec = MeijerGSpec::new(m, 1, vec![1.0], lower)?;
        let mut acc = SignedSum::default();
        for k in 0..=m {
            let ln_w = k as f64 * mm.up.ln() + (m - k) as f64 * mm.sd.ln();
            let g = meijer_g_eval(&spec, x.ln() - ln_w, &cfg)?;
            let ln_mag = m as f64 * mm.c.abs().ln() + ln_binom(m, k) + ln_w;
            let negative = ((m - k) % 2 == 1) ^ (mm.c < 0.0 && m % 2 == 1);
            acc.add(negative, ln_mag, g.line.re, g.line.noise());
        }
        self.finish_probability(acc, "cdf_zeta")
    }

    /// Density of `ζ_m`.
    pub fn pdf_zeta(&self, profile: &LinkProfile, m: usize, x: f64) -> Result<f64> {
        check_rounds(m)?;
        let mm = means(profile)?;
        if x.is_nan() {
            return Err(Error::Domain("pdf_zeta at NaN".into()));
        }
        if x < 0.0 || x == f64::INFINITY || (x == 0.0 && m == 1) {
            return Ok(0.0);
        }
        if x == 0.0 {
            return Err(Error::Domain("the density of a product of two or more factors diverges at 0".into()));
        }
        let spec = MeijerGSpec::new(m, 0, vec![], vec![0.0; m])?;
        let mut acc = SignedSum::default();
        for k in 0..=m {
            let ln_w = k as f64 * mm.up.ln() + (m - k) as f64 * mm.sd.ln();
            let g = meijer_g_eval(&spec, x.ln() - ln_w, &self.contour)?;
            let ln_mag = m as f64 * mm.c.abs().ln() + ln_binom(m, k);
            let negative = ((m - k) % 2 == 1) ^ (mm.c < 0.0 && m % 2 == 1);
            acc.add(negative, ln_mag, g.line.re, g.line.noise());
        }
        self.finish_density(acc, "pdf_zeta")
    }

    /// `P_out(m) = F_ξm(2^{R₁})`.
    pub fn outage_exact(&self, params: &ScenarioParams, m: usize) -> Result<f64> {
        params.validate()?;
        self.cdf_xi(&params.profile, m, params.rate_r1.exp2())
    }

    /// `P̄_out(m) = F_ζm((2^{R₁/m} - 1)^m)`.
    pub fn outage_bound(&self, params: &ScenarioParams, m: usize) -> Result<f64> {
        params.validate()?;
        check_rounds(m)?;
        let t = (params.rate_r1 / m as f64).exp2() - 1.0;
        self.cdf_zeta(&params.profile, m, t.powi(m as i32))
    }

    pub fn outage_family(&self, params: &ScenarioParams, m: usize, family: OutageFamily) -> Result<f64> {
        match family {
            OutageFamily::Exact => self.outage_exact(params, m),
            OutageFamily::Bound => self.outage_bound(params, m),
        }
    }

    /// Per-round outages `m = 1..=M` for one family.
    pub fn per_round(&self, params: &ScenarioParams, family: OutageFamily) -> Result<Vec<f64>> {
        (1..=params.max_rounds).map(|m| self.outage_family(params, m, family)).collect()
    }

    pub fn outage(&self, params: &ScenarioParams) -> Result<OutageResult> {
        let per_round_exact = self.per_round(params, OutageFamily::Exact)?;
        let per_round_bound = self.per_round(params, OutageFamily::Bound)?;
        Ok(OutageResult {
            exact: *per_round_exact.last().expect("M >= 1"),
            bound: *per_round_bound.last().expect("M >= 1"),
            per_round_exact,
            per_round_bound,
        })
    }

    /// Metrics that only need `P(1..M-1)`.
    fn derived(&self, params: &ScenarioParams, family: OutageFamily) -> Result<DerivedMetrics> {
        params.validate()?;
        let mut per_round: Vec<f64> =
            (1..params.max_rounds).map(|m| self.outage_family(params, m, family)).collect::<Result<_>>()?;
        // P(M) does not enter N̄ or E[T_r²]
        per_round.push(f64::NAN);
        DerivedMetrics::from_outages(params, &per_round)
    }

    /// `N̄ = 1 + Σ_{m<M} P_out(m)`.
    pub fn avg_transmissions(&self, params: &ScenarioParams, family: OutageFamily) -> Result<f64> {
        Ok(self.derived(params, family)?.avg_tx)
    }

    pub fn avg_rate(&self, params: &ScenarioParams, family: OutageFamily) -> Result<f64> {
        Ok(self.derived(params, family)?.avg_rate)
    }

    pub fn energy_efficiency(&self, params: &ScenarioParams, family: OutageFamily) -> Result<f64> {
        Ok(self.derived(params, family)?.energy_eff)
    }

    /// `E[T_r²] = 1 + Σ_{m<M} (2m + 1) P_out(m)`.
    pub fn second_moment_tr(&self, params: &ScenarioParams, family: OutageFamily) -> Result<f64> {
        Ok(self.derived(params, family)?.e_tr2)
    }

    /// Pollaczek–Khinchin wait `λE[T_r²]T_F²/(2(1-ρ)) + T_F/2`.
    pub fn waiting_time(&self, params: &ScenarioParams, family: OutageFamily) -> Result<Delay> {
        Ok(self.derived(params, family)?.waiting)
    }

    /// `T_soj = W + N̄ T_F`.
    pub fn sojourn_time(&self, params: &ScenarioParams, family: OutageFamily) -> Result<Delay> {
        Ok(self.derived(params, family)?.sojourn)
    }

    pub fn perf_report(&self, params: &ScenarioParams) -> Result<PerfReport> {
        let outage = self.outage(params)?;
        let exact = DerivedMetrics::from_outages(params, &outage.per_round_exact)?;
        let bound = DerivedMetrics::from_outages(params, &outage.per_round_bound)?;
        Ok(PerfReport { outage, exact, bound })
    }
}
