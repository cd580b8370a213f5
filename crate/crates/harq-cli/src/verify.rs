//! Invariant checks over a sweep grid.

use crate::config::{Metric, SweepConfig};
use crate::sweep::{run_sweep, Row};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

/// Default grid: reference relay, `R₁ = 1`, `M ∈ {1, 2, 3}`, 0–20 dB.
pub const DEFAULT_CONFIG: &str = "\
axis = snr_db
values = 0:5:20
series = max_rounds
series_values = 1, 2, 3
rate_r1 = 1
arrival_rate = 0.01
trials = 200000
metrics = outage
";

/// Largest count of 3σ exceedances that is still plausible by chance among
/// `n` independent comparisons (upper tail below 1%).
fn allowed_exceedances(n: usize) -> usize {
    let p: f64 = 0.0027;
    let mut tail = 1.0;
    for k in 0..=n {
        // P(X = k) for X ~ Binomial(n, p)
        let ln_pk = ln_choose(n, k) + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln();
        tail -= ln_pk.exp();
        if tail < 1e-2 {
            return k;
        }
    }
    n
}

fn ln_choose(n: usize, k: usize) -> f64 {
    (1..=k).map(|i| ((n - k + i) as f64 / i as f64).ln()).sum()
}

fn collect(name: &'static str, failures: Vec<String>, total: usize) -> Check {
    Check {
        name,
        pass: failures.is_empty(),
        detail: match failures.first() {
            None => format!("{total} checked"),
            Some(f) => format!("{} of {total} failed, first: {f}", failures.len()),
        },
    }
}

fn tag(r: &Row) -> String {
    format!("{} dB R₁={} M={} λ={}", r.point.snr_db, r.point.rate_r1, r.point.max_rounds, r.point.arrival_rate)
}

/// Runs the full suite. The metric list of `cfg` is replaced by everything
/// the checks need.
pub fn verify(cfg: &SweepConfig) -> Vec<Check> {
    let mut cfg = cfg.clone();
    cfg.metrics = vec![
        Metric::Outage,
        Metric::Oracle,
        Metric::AvgTx,
        Metric::AvgRate,
        Metric::EnergyEff,
        Metric::Waiting,
        Metric::Sojourn,
        Metric::Mc,
    ];
    let rows = run_sweep(&cfg);
    let g = |r: &Row, c: &str| r.get(&cfg, c);
    let eps = 1e-9;
    let mut checks = Vec::new();

    let failures: Vec<String> =
        rows.iter().filter(|r| !r.errors.is_empty()).map(|r| format!("{}: {}", tag(r), r.errors.join("; "))).collect();
    checks.push(collect("evaluation", failures, rows.len()));

    let mut failures = Vec::new();
    for r in &rows {
        if let (Some(e), Some(b)) = (g(r, "outage_exact"), g(r, "outage_bound")) {
            if b < e - eps {
                failures.push(format!("{}: bound {b} < exact {e}", tag(r)));
            }
        }
        if let (Some(e), Some(b)) = (g(r, "avg_tx_exact"), g(r, "avg_tx_bound")) {
            if b < e - eps {
                failures.push(format!("{}: N̄ bound {b} < N̄ {e}", tag(r)));
            }
        }
    }
    checks.push(collect("dominance", failures, rows.len()));

    let mut failures = Vec::new();
    let per_series = cfg.values.len();
    for chunk in rows.chunks(per_series) {
        for w in chunk.windows(2) {
            for col in ["outage_exact", "outage_bound"] {
                if let (Some(a), Some(b)) = (g(&w[0], col), g(&w[1], col)) {
                    let bad = match cfg.axis.name() {
                        "snr_db" | "max_rounds" => b > a + eps,
                        "rate_r1" => b < a - eps,
                        _ => false,
                    };
                    if bad {
                        failures.push(format!("{} → {}: {col} {a} → {b}", tag(&w[0]), tag(&w[1])));
                    }
                }
            }
        }
    }
    checks.push(collect("monotonicity", failures, rows.len()));

    let mut failures = Vec::new();
    for r in &rows {
        let (m, r1) = (r.point.max_rounds as f64, r.point.rate_r1);
        for col in ["outage_exact", "outage_bound"] {
            if let Some(v) = g(r, col) {
                if !(0.0..=1.0).contains(&v) {
                    failures.push(format!("{}: {col} = {v}", tag(r)));
                }
            }
        }
        for fam in ["exact", "bound"] {
            if let Some(n) = g(r, &format!("avg_tx_{fam}")) {
                if n < 1.0 - eps || n > m + eps {
                    failures.push(format!("{}: N̄ {fam} = {n}", tag(r)));
                }
            }
            if let Some(rate) = g(r, &format!("avg_rate_{fam}")) {
                if rate < r1 / (2.0 * m) - eps || rate > r1 / 2.0 + eps {
                    failures.push(format!("{}: R̄ {fam} = {rate}", tag(r)));
                }
            }
        }
    }
    checks.push(collect("ranges", failures, rows.len()));

    let mut failures = Vec::new();
    for r in &rows {
        for fam in ["exact", "bound"] {
            let get = |c: &str| g(r, &format!("{c}_{fam}"));
            if let (Some(eta), Some(rate)) = (get("energy_eff"), get("avg_rate")) {
                if (eta * r.point.power - 2.0 * rate).abs() > 1e-12 * rate {
                    failures.push(format!("{}: ηP ≠ 2R̄ ({fam})", tag(r)));
                }
            }
            if let (Some(w), Some(t), Some(n)) = (get("waiting"), get("sojourn"), get("avg_tx")) {
                if (t - w - n * r.point.frame_time).abs() > 1e-12 * t {
                    failures.push(format!("{}: T_soj ≠ W + N̄T_F ({fam})", tag(r)));
                }
            }
        }
    }
    checks.push(collect("identities", failures, rows.len()));

    let mut failures = Vec::new();
    let mut compared = 0;
    for r in &rows {
        if let (Some(a), Some(o)) = (g(r, "outage_exact"), g(r, "oracle_outage")) {
            compared += 1;
            if (a - o).abs() > 1e-5 {
                failures.push(format!("{}: analytic {a} vs quadrature {o}", tag(r)));
            }
        }
    }
    checks.push(collect("oracle agreement", failures, compared));

    let mut exceed = Vec::new();
    let mut compared = 0;
    for r in &rows {
        if let (Some(a), Some(mc), Some(se)) = (g(r, "outage_exact"), g(r, "mc_outage"), g(r, "mc_outage_se")) {
            if a <= 1e-4 {
                continue;
            }
            compared += 1;
            let sigma = if se > 0.0 { se } else { (a * (1.0 - a) / cfg.trials as f64).sqrt() };
            let z = (a - mc).abs() / sigma;
            if z > 3.0 {
                exceed.push(format!("{}: z = {z:.2}", tag(r)));
            }
        }
    }
    let allowed = allowed_exceedances(compared);
    checks.push(Check {
        name: "monte carlo 3σ",
        pass: exceed.len() <= allowed,
        detail: format!(
            "{compared} points above 1e-4, {} outside 3σ (chance allows {allowed}){}",
            exceed.len(),
            exceed.first().map(|e| format!(", first: {e}")).unwrap_or_default()
        ),
    });
    checks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chance_allowance() {
        assert_eq!(allowed_exceedances(1), 0);
        assert_eq!(allowed_exceedances(15), 1);
        assert!(allowed_exceedances(200) >= 2);
    }
}
