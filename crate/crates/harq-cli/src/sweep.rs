//! Grid evaluation. Points run on the current rayon pool; rows come back in
//! grid order whatever the completion order.

use rayon::prelude::*;

use harq_core::analytic::{Delay, DerivedMetrics};
use harq_core::oracle::{cdf_xi_recursive, QuadratureGrid, MAX_DEPTH};
use harq_core::sim::{estimate_moments, estimate_outage, simulate_queue_replications, McConfig};
use harq_core::{Evaluator, OutageFamily, ScenarioParams};

use crate::config::{Base, Metric, SweepConfig};

/// One grid point. `cells` line up with the metric columns of the config.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub point: Base,
    pub cells: Vec<Option<f64>>,
    pub errors: Vec<String>,
}

impl Row {
    /// Cell by column name, `None` when absent or not computed.
    pub fn get(&self, cfg: &SweepConfig, column: &str) -> Option<f64> {
        let cols = cfg.columns();
        let i = cols.iter().position(|c| *c == column)?;
        // four coordinate columns come first
        self.cells.get(i.checked_sub(4)?).copied().flatten()
    }
}

/// Per-point seed: spread the index so neighbouring points never share
/// generator streams.
pub fn point_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

struct Family {
    outage: Result<f64, String>,
    derived: Result<DerivedMetrics, String>,
}

fn family(ev: &Evaluator, params: &ScenarioParams, fam: OutageFamily) -> Family {
    let m = params.max_rounds;
    let head: Result<Vec<f64>, String> =
        (1..m).map(|k| ev.outage_family(params, k, fam).map_err(|e| e.to_string())).collect();
    let outage = ev.outage_family(params, m, fam).map_err(|e| e.to_string());
    let derived = head.and_then(|mut h| {
        // P(M) does not enter the derived metrics
        h.push(f64::NAN);
        DerivedMetrics::from_outages(params, &h).map_err(|e| e.to_string())
    });
    Family { outage, derived }
}

fn delay(d: Delay, what: &str, errors: &mut Vec<String>) -> Option<f64> {
    match d {
        Delay::Stable(v) => Some(v),
        Delay::Unstable { rho } => {
            errors.push(format!("{what}: queue unstable (rho = {rho})"));
            None
        }
    }
}

fn take<T>(r: &Result<T, String>, what: &str, errors: &mut Vec<String>) -> Option<T>
where
    T: Copy,
{
    match r {
        Ok(v) => Some(*v),
        Err(e) => {
            let msg = format!("{what}: {e}");
            if !errors.contains(&msg) {
                errors.push(msg);
            }
            None
        }
    }
}

/// Evaluates every requested metric at one point.
pub fn evaluate_point(cfg: &SweepConfig, index: usize, point: &Base) -> Row {
    let mut cells = Vec::new();
    let mut errors = Vec::new();
    let width: usize = cfg.metrics.iter().map(|m| m.columns().len()).sum();
    let params = match point.params() {
        Ok(p) => p,
        Err(e) => {
            return Row { point: *point, cells: vec![None; width], errors: vec![format!("scenario: {e}")] };
        }
    };
    let ev = Evaluator { contour: cfg.contour, noise_limit: cfg.noise_limit };
    let needs_analytic = cfg.metrics.iter().any(|m| {
        matches!(
            m,
            Metric::Outage | Metric::AvgTx | Metric::AvgRate | Metric::EnergyEff | Metric::Waiting | Metric::Sojourn
        )
    });
    let (exact, bound) = if needs_analytic {
        (Some(family(&ev, &params, OutageFamily::Exact)), Some(family(&ev, &params, OutageFamily::Bound)))
    } else {
        (None, None)
    };
    let seed = point_seed(cfg.seed, index);
    for metric in &cfg.metrics {
        match metric {
            Metric::Outage => {
                let (e, b) = (exact.as_ref().unwrap(), bound.as_ref().unwrap());
                cells.push(take(&e.outage, "outage_exact", &mut errors));
                cells.push(take(&b.outage, "outage_bound", &mut errors));
            }
            Metric::AvgTx | Metric::AvgRate | Metric::EnergyEff | Metric::Waiting | Metric::Sojourn => {
                for (fam, tag) in [(exact.as_ref().unwrap(), "exact"), (bound.as_ref().unwrap(), "bound")] {
                    let what = format!("{}_{tag}", metric.name());
                    let d = take(&fam.derived, &format!("derived_{tag}"), &mut errors);
                    cells.push(d.and_then(|d| match metric {
                        Metric::AvgTx => Some(d.avg_tx),
                        Metric::AvgRate => Some(d.avg_rate),
                        Metric::EnergyEff => Some(d.energy_eff),
                        Metric::Waiting => delay(d.waiting, &what, &mut errors),
                        _ => delay(d.sojourn, &what, &mut errors),
                    }));
                }
            }
            Metric::NoRelay => {
                let r = ev.outage_no_relay(&params, params.max_rounds, cfg.baseline).map_err(|e| e.to_string());
                cells.push(take(&r, "outage_no_relay", &mut errors));
            }
            Metric::Oracle => {
                if params.max_rounds <= MAX_DEPTH {
                    let grid = QuadratureGrid { abs_tol: cfg.oracle_tol, ..QuadratureGrid::default() };
                    let r = cdf_xi_recursive(&params.profile, params.max_rounds, params.rate_r1.exp2(), &grid)
                        .map_err(|e| e.to_string());
                    cells.push(take(&r, "oracle_outage", &mut errors));
                } else {
                    cells.push(None);
                }
            }
            Metric::Mc => {
                let mc = McConfig::new(cfg.trials, seed);
                match estimate_outage(&params, &mc, cfg.srd) {
                    Ok(e) => cells.extend([Some(e.mean), Some(e.std_error)]),
                    Err(e) => {
                        errors.push(format!("mc_outage: {e}"));
                        cells.extend([None, None]);
                    }
                }
                match estimate_moments(&params, &mc, cfg.srd) {
                    Ok(m) => cells.extend([Some(m.avg_tx.mean), Some(m.avg_tx.std_error)]),
                    Err(e) => {
                        errors.push(format!("mc_avg_tx: {e}"));
                        cells.extend([None, None]);
                    }
                }
            }
            Metric::Queue => {
                match simulate_queue_replications(&params, cfg.packets, cfg.replications, seed, cfg.srd, None) {
                    Ok(traces) => {
                        let (w, we) = mean_se(traces.iter().map(|t| t.mean_wait));
                        let (s, se) = mean_se(traces.iter().map(|t| t.mean_sojourn));
                        cells.extend([Some(w), we, Some(s), se]);
                    }
                    Err(e) => {
                        errors.push(format!("queue: {e}"));
                        cells.extend([None; 4]);
                    }
                }
            }
        }
    }
    Row { point: *point, cells, errors }
}

/// Mean and standard error over replications; no error with one sample.
fn mean_se(xs: impl Iterator<Item = f64>) -> (f64, Option<f64>) {
    let v: Vec<f64> = xs.collect();
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, None);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, Some((var / n).sqrt()))
}

pub fn run_sweep(cfg: &SweepConfig) -> Vec<Row> {
    let points = cfg.points();
    points.par_iter().enumerate().map(|(i, p)| evaluate_point(cfg, i, p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_in_grid_order_with_errors_in_row() {
        let cfg = SweepConfig::parse(
            "axis = arrival_rate\nvalues = 0.01, 0.5, 2\nmax_rounds = 2\nsnr_db = 5\nmetrics = outage, sojourn\n",
            "t",
        )
        .unwrap();
        let rows = run_sweep(&cfg);
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[2].point.arrival_rate, 2.0);
        assert!(rows[0].errors.is_empty());
        // λ = 2 overloads a one-second frame
        assert!(rows[2].errors.iter().any(|e| e.contains("unstable")));
        assert!(rows[2].get(&cfg, "outage_exact").is_some());
        assert!(rows[2].get(&cfg, "sojourn_exact").is_none());
    }

    #[test]
    fn seeds_are_spread() {
        assert_ne!(point_seed(1, 0), point_seed(1, 1));
        assert_ne!(point_seed(1, 0), point_seed(2, 0));
    }
}
