use harq_core::channel::draw_round;
use harq_core::oracle::{cdf_xi_recursive, QuadratureGrid};
use harq_core::sim::{estimate_moments, estimate_outage, McConfig, SrdModel};
use harq_core::{Evaluator, LinkProfile, LinkStreams, OutageFamily, ScenarioParams};

/// Dvoretzky–Kiefer–Wolfowitz: the empirical CDF of `ξ_2` stays inside the
/// `α = 1e-3` band around the analytic CDF.
#[test]
fn empirical_cdf_inside_dkw_band() {
    let p = LinkProfile::reference(8.0).unwrap();
    let n = 40_000usize;
    let mut streams = LinkStreams::new(5, 0);
    let mut xs: Vec<f64> = (0..n)
        .map(|_| {
            let a = draw_round(&p, &mut streams).g_total_bound;
            let b = draw_round(&p, &mut streams).g_total_bound;
            (1.0 + a) * (1.0 + b)
        })
        .collect();
    xs.sort_by(f64::total_cmp);
    let band = ((2.0f64 / 1e-3).ln() / (2.0 * n as f64)).sqrt();
    let ev = Evaluator::default();
    let mut worst: f64 = 0.0;
    for q in 1..40 {
        let i = q * n / 40;
        let x = xs[i];
        let f = ev.cdf_xi(&p, 2, x).unwrap();
        worst = worst.max((f - (i + 1) as f64 / n as f64).abs()).max((f - i as f64 / n as f64).abs());
    }
    assert!(worst < band, "sup gap {worst} vs band {band}");
}

#[test]
fn moments_match_analytic_chain() {
    let params = ScenarioParams::new(LinkProfile::reference(5.0).unwrap(), 1.0, 3, 1.0, 0.01).unwrap();
    let ev = Evaluator::default();
    let mc = estimate_moments(&params, &McConfig::new(200_000, 21), SrdModel::MinBound).unwrap();
    let n = ev.avg_transmissions(&params, OutageFamily::Exact).unwrap();
    let e2 = ev.second_moment_tr(&params, OutageFamily::Exact).unwrap();
    assert!((mc.avg_tx.mean - n).abs() < 3.0 * mc.avg_tx.std_error, "{} vs {n}", mc.avg_tx.mean);
    assert!((mc.e_tr2.mean - e2).abs() < 3.0 * mc.e_tr2.std_error, "{} vs {e2}", mc.e_tr2.mean);
    assert!(mc.avg_tx.mean <= mc.e_tr2.mean.sqrt());
}

#[test]
fn single_round_moments_are_exact() {
    let params = ScenarioParams::new(LinkProfile::reference(0.0).unwrap(), 2.0, 1, 1.0, 0.0).unwrap();
    let mc = estimate_moments(&params, &McConfig::new(1000, 1), SrdModel::Exact).unwrap();
    assert_eq!((mc.avg_tx.mean, mc.e_tr2.mean), (1.0, 1.0));
}

#[test]
fn exact_relay_snr_is_pessimistic() {
    let params = ScenarioParams::new(LinkProfile::reference(6.0).unwrap(), 2.0, 2, 1.0, 0.0).unwrap();
    let cfg = McConfig::new(200_000, 8);
    let exact = estimate_outage(&params, &cfg, SrdModel::Exact).unwrap();
    let bound = estimate_outage(&params, &cfg, SrdModel::MinBound).unwrap();
    assert!(exact.mean >= bound.mean - 3.0 * bound.std_error);
}

#[test]
fn standard_error_scales_with_root_n() {
    let params = ScenarioParams::new(LinkProfile::reference(5.0).unwrap(), 1.0, 2, 1.0, 0.0).unwrap();
    let a = estimate_outage(&params, &McConfig::new(100_000, 3), SrdModel::MinBound).unwrap();
    let b = estimate_outage(&params, &McConfig::new(400_000, 3), SrdModel::MinBound).unwrap();
    let ratio = a.std_error / b.std_error;
    assert!((ratio - 2.0).abs() < 0.4, "ratio {ratio}");
}

#[test]
fn oracle_is_monotone_in_snr() {
    let g = QuadratureGrid::default();
    let mut prev = 1.0;
    for snr in [0.0, 5.0, 10.0, 15.0] {
        let v = cdf_xi_recursive(&LinkProfile::reference(snr).unwrap(), 3, 4.0, &g).unwrap();
        assert!(v <= prev + 1e-7);
        prev = v;
    }
}
