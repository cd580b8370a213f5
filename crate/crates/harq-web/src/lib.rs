//! WebAssembly bindings behind `www/index.html`.
//!
//! Every function returns a flat row-major array so the page can plot it
//! without a serialization layer. A point that fails to evaluate comes back
//! as NaN and simply leaves a gap in the curve.

use harq_core::analytic::Delay;
use harq_core::{BaselinePower, Evaluator, LinkProfile, OutageFamily, ScenarioParams};
use wasm_bindgen::prelude::*;

fn grid(lo: f64, hi: f64, points: u32) -> Result<Vec<f64>, String> {
    if points < 2 || !(lo.is_finite() && hi.is_finite()) || hi <= lo {
        return Err(format!("need lo < hi and at least 2 points, got {lo}..{hi} with {points}"));
    }
    let step = (hi - lo) / f64::from(points - 1);
    Ok((0..points).map(|i| lo + step * f64::from(i)).collect())
}

fn scenario(snr_db: f64, rate_r1: f64, max_rounds: u32, arrival_rate: f64) -> Result<ScenarioParams, String> {
    let profile = LinkProfile::reference(snr_db).map_err(|e| e.to_string())?;
    ScenarioParams::new(profile, rate_r1, max_rounds as usize, 1.0, arrival_rate).map_err(|e| e.to_string())
}

fn or_nan(r: harq_core::Result<f64>) -> f64 {
    r.unwrap_or(f64::NAN)
}

fn stable(d: Option<Delay>) -> f64 {
    match d {
        Some(Delay::Stable(v)) => v,
        _ => f64::NAN,
    }
}

/// Rows of `[snr_db, exact, bound, no_relay]` for `M` rounds at rate `R₁`.
#[wasm_bindgen]
pub fn outage_curves(snr_lo: f64, snr_hi: f64, points: u32, rate_r1: f64, max_rounds: u32) -> Result<Vec<f64>, String> {
    scenario(snr_lo, rate_r1, max_rounds, 0.0)?;
    let ev = Evaluator::default();
    let mut out = Vec::new();
    for snr in grid(snr_lo, snr_hi, points)? {
        let p = scenario(snr, rate_r1, max_rounds, 0.0)?;
        let m = p.max_rounds;
        out.extend([
            snr,
            or_nan(ev.outage_exact(&p, m)),
            or_nan(ev.outage_bound(&p, m)),
            or_nan(ev.outage_no_relay(&p, m, BaselinePower::PerNode)),
        ]);
    }
    Ok(out)
}

/// Rows of `[snr_db, N̄, R̄, η]` from the exact outage family.
#[wasm_bindgen]
pub fn throughput_curves(
    snr_lo: f64,
    snr_hi: f64,
    points: u32,
    rate_r1: f64,
    max_rounds: u32,
) -> Result<Vec<f64>, String> {
    scenario(snr_lo, rate_r1, max_rounds, 0.0)?;
    let ev = Evaluator::default();
    let mut out = Vec::new();
    for snr in grid(snr_lo, snr_hi, points)? {
        let p = scenario(snr, rate_r1, max_rounds, 0.0)?;
        out.push(snr);
        // P(M) does not enter the derived metrics
        let head: harq_core::Result<Vec<f64>> = (1..p.max_rounds).map(|m| ev.outage_exact(&p, m)).collect();
        match head {
            Ok(mut per_round) => {
                per_round.push(f64::NAN);
                let d = harq_core::DerivedMetrics::from_outages(&p, &per_round).map_err(|e| e.to_string())?;
                out.extend([d.avg_tx, d.avg_rate, d.energy_eff]);
            }
            Err(_) => out.extend([f64::NAN; 3]),
        }
    }
    Ok(out)
}

/// Rows of `[λ, W, T_soj]` with a one-second frame; NaN past saturation.
#[wasm_bindgen]
pub fn delay_curve(
    lambda_lo: f64,
    lambda_hi: f64,
    points: u32,
    snr_db: f64,
    rate_r1: f64,
    max_rounds: u32,
) -> Result<Vec<f64>, String> {
    if lambda_lo < 0.0 {
        return Err(format!("arrival rate must be >= 0, got {lambda_lo}"));
    }
    let base = scenario(snr_db, rate_r1, max_rounds, lambda_lo)?;
    let per_round = Evaluator::default().per_round(&base, OutageFamily::Exact).map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    for lambda in grid(lambda_lo, lambda_hi, points)? {
        let p = ScenarioParams { arrival_rate: lambda, ..base };
        let d = harq_core::DerivedMetrics::from_outages(&p, &per_round).ok();
        out.extend([lambda, stable(d.map(|d| d.waiting)), stable(d.map(|d| d.sojourn))]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn outage_rows() {
        let v = outage_curves(0.0, 20.0, 3, 1.0, 2).unwrap();
        assert_eq!(v.len(), 12);
        for row in v.chunks(4) {
            assert!(row[1] <= row[2] + 1e-9 && row[1] <= row[3], "{row:?}");
        }
        assert!(v[5] < v[1]);
    }

    #[test]
    fn throughput_rows() {
        let v = throughput_curves(0.0, 30.0, 4, 2.0, 3).unwrap();
        let last = &v[12..];
        assert!((last[1] - 1.0).abs() < 0.05);
        assert!((last[2] - 1.0).abs() < 0.05);
    }

    #[test]
    fn delay_saturates() {
        let v = delay_curve(0.1, 0.9, 5, 0.0, 1.0, 3).unwrap();
        assert!(v[1].is_finite());
        assert!(v[v.len() - 1].is_nan());
        assert!(delay_curve(0.1, 0.1, 5, 0.0, 1.0, 3).is_err());
    }
}
