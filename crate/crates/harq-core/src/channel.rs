//! Link profile, fading realizations and the per-round SNR law.
//!
//! Each HARQ round the destination sees `γ_l = γ_SD + γ_SRD`. The relayed
//! SNR is replaced by `γ_up = min(γ_SR, γ_RD)`, which is exponential with mean
//! `γ̄_SR γ̄_RD / (γ̄_SR + γ̄_RD)`, so `γ_l` is hypoexponential with density
//! `C (e^{-x/γ̄_up} - e^{-x/γ̄_SD})`, `C = 1/(γ̄_up - γ̄_SD)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};

/// Relative gap below which `γ̄_up` and `γ̄_SD` are treated as equal.
const DEGENERATE_REL_GAP: f64 = 1e-9;

/// Mean squared gains of the three links plus the per-round power and the
/// system SNR that scales every mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkProfile {
    mean_sd: f64,
    mean_sr: f64,
    mean_rd: f64,
    power: f64,
    snr_db: f64,
}

impl LinkProfile {
    pub fn new(mean_sd: f64, mean_sr: f64, mean_rd: f64, power: f64, snr_db: f64) -> Result<Self> {
        for (name, v) in [("mean_sd", mean_sd), ("mean_sr", mean_sr), ("mean_rd", mean_rd)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        if !(power.is_finite() && power > 0.0) {
            return Err(Error::InvalidParameter(format!("power must be finite and > 0, got {power}")));
        }
        if !snr_db.is_finite() {
            return Err(Error::InvalidParameter(format!("snr_db must be finite, got {snr_db}")));
        }
        let p = Self { mean_sd, mean_sr, mean_rd, power, snr_db };
        for (name, v) in [("sd", p.eff_sd()), ("sr", p.eff_sr()), ("rd", p.eff_rd())] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "effective {name} mean out of range ({v}) at snr_db = {snr_db}"
                )));
            }
        }
        Ok(p)
    }

    /// The reference scenario: means 0.1 / 0.3 / 0.5 and unit power.
    pub fn reference(snr_db: f64) -> Result<Self> {
        Self::new(0.1, 0.3, 0.5, 1.0, snr_db)
    }

    pub fn with_snr_db(&self, snr_db: f64) -> Result<Self> {
        Self::new(self.mean_sd, self.mean_sr, self.mean_rd, self.power, snr_db)
    }

    pub fn with_power(&self, power: f64) -> Result<Self> {
        Self::new(self.mean_sd, self.mean_sr, self.mean_rd, power, self.snr_db)
    }

    pub fn mean_sd(&self) -> f64 {
        self.mean_sd
    }
    pub fn mean_sr(&self) -> f64 {
        self.mean_sr
    }
    pub fn mean_rd(&self) -> f64 {
        self.mean_rd
    }
    pub fn power(&self) -> f64 {
        self.power
    }
    pub fn snr_db(&self) -> f64 {
        self.snr_db
    }

    pub fn snr_linear(&self) -> f64 {
        10f64.powf(self.snr_db / 10.0)
    }

    pub fn eff_sd(&self) -> f64 {
        self.mean_sd * self.snr_linear()
    }
    pub fn eff_sr(&self) -> f64 {
        self.mean_sr * self.snr_linear()
    }
    pub fn eff_rd(&self) -> f64 {
        self.mean_rd * self.snr_linear()
    }

    /// Mean of `min(γ_SR, γ_RD)`.
    pub fn eff_up(&self) -> f64 {
        let (sr, rd) = (self.eff_sr(), self.eff_rd());
        sr * rd / (sr + rd)
    }

    /// `C = 1/(γ̄_up - γ̄_SD)`; negative when `γ̄_up < γ̄_SD`.
    pub fn constant_c(&self) -> Result<f64> {
        let (up, sd) = (self.eff_up(), self.eff_sd());
        if ((up - sd) / sd).abs() <= DEGENERATE_REL_GAP {
            return Err(Error::DegenerateMeans { mean_up: up, mean_sd: sd });
        }
        Ok(1.0 / (up - sd))
    }

    /// Density of `γ_l = γ_SD + γ_up`.
    pub fn gamma_l_pdf(&self, x: f64) -> Result<f64> {
        let c = self.constant_c()?;
        if x.is_nan() {
            return Err(Error::Domain("gamma_l_pdf at NaN".into()));
        }
        if x <= 0.0 {
            return Ok(0.0);
        }
        let (up, sd) = (self.eff_up(), self.eff_sd());
        // e^{-x/up} - e^{-x/sd} = -e^{-x/up} expm1(-x(1/sd - 1/up)); C and the
        // bracket share a sign, so the product is nonnegative.
        let v = -c * (-x / up).exp() * (-x * (1.0 / sd - 1.0 / up)).exp_m1();
        Ok(v.max(0.0))
    }

    /// Distribution function of `γ_l`.
    pub fn gamma_l_cdf(&self, x: f64) -> Result<f64> {
        let c = self.constant_c()?;
        if x.is_nan() {
            return Err(Error::Domain("gamma_l_cdf at NaN".into()));
        }
        if x <= 0.0 {
            return Ok(0.0);
        }
        let (up, sd) = (self.eff_up(), self.eff_sd());
        let v = if x <= up.max(sd) {
            c * (sd * (-x / sd).exp_m1() - up * (-x / up).exp_m1())
        } else {
            1.0 - c * (up * (-x / up).exp() - sd * (-x / sd).exp())
        };
        Ok(v.clamp(0.0, 1.0))
    }
}

/// Power normalization of the direct-link-only comparison scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BaselinePower {
    /// The source keeps its per-round power; the direct link mean is `γ̄_SD`.
    #[default]
    PerNode,
    /// The source also spends the relay's share, doubling the mean to `2γ̄_SD`.
    TotalEnergy,
}

impl BaselinePower {
    pub fn direct_mean(&self, profile: &LinkProfile) -> f64 {
        match self {
            BaselinePower::PerNode => profile.eff_sd(),
            BaselinePower::TotalEnergy => 2.0 * profile.eff_sd(),
        }
    }
}

/// A full operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioParams {
    pub profile: LinkProfile,
    /// Initial rate `R₁` in bits per channel use.
    pub rate_r1: f64,
    /// Maximum number of HARQ rounds `M`.
    pub max_rounds: usize,
    /// Frame duration `T_F` in seconds.
    pub frame_time: f64,
    /// Packet arrival rate `λ` in packets per second.
    pub arrival_rate: f64,
}

impl ScenarioParams {
    pub fn new(
        profile: LinkProfile,
        rate_r1: f64,
        max_rounds: usize,
        frame_time: f64,
        arrival_rate: f64,
    ) -> Result<Self> {
        let p = Self { profile, rate_r1, max_rounds, frame_time, arrival_rate };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rate_r1.is_finite() && self.rate_r1 > 0.0) {
            return Err(Error::InvalidParameter(format!("rate_r1 must be > 0, got {}", self.rate_r1)));
        }
        if self.max_rounds == 0 {
            return Err(Error::InvalidParameter("max_rounds must be >= 1".into()));
        }
        if !(self.frame_time.is_finite() && self.frame_time > 0.0) {
            return Err(Error::InvalidParameter(format!("frame_time must be > 0, got {}", self.frame_time)));
        }
        if !(self.arrival_rate.is_finite() && self.arrival_rate >= 0.0) {
            return Err(Error::InvalidParameter(format!("arrival_rate must be >= 0, got {}", self.arrival_rate)));
        }
        Ok(())
    }
}

/// One round's channel realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundDraw {
    pub g_sd: f64,
    pub g_sr: f64,
    pub g_rd: f64,
    /// `γ_SR γ_RD / (1 + γ_SR + γ_RD)`.
    pub g_srd_exact: f64,
    /// `min(γ_SR, γ_RD)`.
    pub g_up: f64,
    pub g_total_exact: f64,
    pub g_total_bound: f64,
}

/// Independent generator streams for the three links.
///
/// Stream ids are `3·index + {0, 1, 2}` under a common seed, so distinct
/// indices never share a stream.
#[derive(Debug, Clone)]
pub struct LinkStreams {
    pub sd: ChaCha8Rng,
    pub sr: ChaCha8Rng,
    pub rd: ChaCha8Rng,
}

impl LinkStreams {
    pub fn new(seed: u64, index: u64) -> Self {
        let mk = |k: u64| {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            r.set_stream(3 * index + k);
            r
        };
        Self { sd: mk(0), sr: mk(1), rd: mk(2) }
    }
}

/// Draw the three link gains for one round.
pub fn draw_round(profile: &LinkProfile, streams: &mut LinkStreams) -> RoundDraw {
    let e_sd: f64 = Exp1.sample(&mut streams.sd);
    let e_sr: f64 = Exp1.sample(&mut streams.sr);
    let e_rd: f64 = Exp1.sample(&mut streams.rd);
    let g_sd = e_sd * profile.eff_sd();
    let g_sr = e_sr * profile.eff_sr();
    let g_rd = e_rd * profile.eff_rd();
    let g_srd_exact = g_sr * g_rd / (1.0 + g_sr + g_rd);
    let g_up = g_sr.min(g_rd);
    RoundDraw { g_sd, g_sr, g_rd, g_srd_exact, g_up, g_total_exact: g_sd + g_srd_exact, g_total_bound: g_sd + g_up }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_matches_hand_value() {
        let p = LinkProfile::reference(0.0).unwrap();
        assert!((p.eff_up() - 0.1875).abs() < 1e-15);
        assert!((p.constant_c().unwrap() - 1.0 / 0.0875).abs() < 1e-12);
        let p10 = p.with_snr_db(10.0).unwrap();
        let ratio = p10.constant_c().unwrap() / p.constant_c().unwrap();
        assert!((ratio - 0.1).abs() < 1e-12);
    }

    #[test]
    fn degenerate_means_rejected() {
        // up = 0.3*0.6/0.9 = 0.2
        let p = LinkProfile::new(0.2, 0.3, 0.6, 1.0, 0.0).unwrap();
        assert!(matches!(p.constant_c(), Err(Error::DegenerateMeans { .. })));
        assert!(p.gamma_l_pdf(1.0).is_err());
    }

    #[test]
    fn invalid_profiles_rejected() {
        assert!(LinkProfile::new(f64::INFINITY, 0.3, 0.5, 1.0, 0.0).is_err());
        assert!(LinkProfile::new(0.1, 0.0, 0.5, 1.0, 0.0).is_err());
        assert!(LinkProfile::new(0.1, 0.3, 0.5, -1.0, 0.0).is_err());
        assert!(LinkProfile::new(0.1, 0.3, 0.5, 1.0, 4000.0).is_err());
    }

    #[test]
    fn pdf_and_cdf_limits() {
        let p = LinkProfile::reference(3.0).unwrap();
        assert_eq!(p.gamma_l_pdf(0.0).unwrap(), 0.0);
        assert_eq!(p.gamma_l_cdf(0.0).unwrap(), 0.0);
        assert!((1.0 - p.gamma_l_cdf(200.0).unwrap()) < 1e-12);
        // sd > up branch (negative C) still gives a nonnegative density
        let q = LinkProfile::new(0.9, 0.3, 0.5, 1.0, 0.0).unwrap();
        assert!(q.constant_c().unwrap() < 0.0);
        for i in 0..200 {
            assert!(q.gamma_l_pdf(i as f64 * 0.05).unwrap() >= 0.0);
        }
    }

    #[test]
    fn cdf_branches_agree() {
        let p = LinkProfile::reference(0.0).unwrap();
        let (up, sd, c) = (p.eff_up(), p.eff_sd(), p.constant_c().unwrap());
        for &x in &[0.01, 0.1, 0.18, 0.5] {
            let direct = 1.0 - c * (up * (-x / up).exp() - sd * (-x / sd).exp());
            assert!((p.gamma_l_cdf(x).unwrap() - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn draws_are_deterministic_and_ordered() {
        let p = LinkProfile::reference(5.0).unwrap();
        let mut a = LinkStreams::new(42, 7);
        let mut b = LinkStreams::new(42, 7);
        for _ in 0..100 {
            let (x, y) = (draw_round(&p, &mut a), draw_round(&p, &mut b));
            assert_eq!(x, y);
            assert!(x.g_srd_exact <= x.g_up);
            assert!(x.g_total_exact <= x.g_total_bound);
        }
    }

    #[test]
    fn scenario_validation() {
        let p = LinkProfile::reference(0.0).unwrap();
        assert!(ScenarioParams::new(p, 0.0, 2, 1.0, 0.0).is_err());
        assert!(ScenarioParams::new(p, 1.0, 0, 1.0, 0.0).is_err());
        assert!(ScenarioParams::new(p, 1.0, 2, 0.0, 0.0).is_err());
        assert!(ScenarioParams::new(p, 1.0, 2, 1.0, -0.1).is_err());
        assert!(ScenarioParams::new(p, 1.0, 2, 1.0, 0.0).is_ok());
    }
}
