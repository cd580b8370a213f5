use harq_core::special::{lower_series, scaled_upper_gamma, upper_incomplete_gamma};
use harq_core::{ContourConfig, Error, Evaluator, LinkProfile, OutageFamily, ScenarioParams};
use num_complex::Complex64;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn incomplete_gamma_recurrence(re in 0.1f64..8.0, im in -8.0f64..8.0, a in 0.01f64..15.0) {
        let s = Complex64::new(re, im);
        let lhs = upper_incomplete_gamma(s + 1.0, a).unwrap();
        let rhs = s * upper_incomplete_gamma(s, a).unwrap() + (s * a.ln() - a).exp();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * lhs.norm());
    }

    #[test]
    fn scaled_form_is_consistent(re in 0.2f64..5.0, im in -4.0f64..4.0, a in 0.05f64..10.0) {
        let s = Complex64::new(re, im);
        let g = upper_incomplete_gamma(s, a).unwrap();
        let scaled = scaled_upper_gamma(s, a).unwrap();
        // g(s, a) = e^a a^{-s} Γ(s, a)
        let back = scaled * (s * a.ln() - a).exp();
        prop_assert!((back - g).norm() <= 1e-10 * g.norm());
        // the algebraic part stays finite
        prop_assert!(lower_series(s, a).unwrap().norm().is_finite());
    }

    #[test]
    fn outage_probabilities_are_ordered(snr in -2.0f64..25.0, r1 in 0.5f64..4.0, m in 1usize..5) {
        let params = ScenarioParams::new(LinkProfile::reference(snr).unwrap(), r1, m, 1.0, 0.0).unwrap();
        let ev = Evaluator::default();
        let exact = ev.outage_exact(&params, m).unwrap();
        let bound = ev.outage_bound(&params, m).unwrap();
        prop_assert!((0.0..=1.0).contains(&exact));
        prop_assert!(bound >= exact - 1e-9, "bound {bound} exact {exact}");
        let n = ev.avg_transmissions(&params, OutageFamily::Exact).unwrap();
        prop_assert!(n >= 1.0 && n <= m as f64 + 1e-12);
    }
}

#[test]
fn degenerate_profile_is_reported() {
    // γ̄_up = 0.3·0.6/0.9 = 0.2 = γ̄_SD
    let p = LinkProfile::new(0.2, 0.3, 0.6, 1.0, 0.0).unwrap();
    let r = Evaluator::default().cdf_xi(&p, 2, 3.0);
    assert!(matches!(r, Err(Error::DegenerateMeans { .. })));
}

#[test]
fn contour_misconfiguration_surfaces() {
    let ev = Evaluator::new(ContourConfig::default().with_abscissa(5.0));
    let params = ScenarioParams::new(LinkProfile::reference(5.0).unwrap(), 1.0, 3, 1.0, 0.0).unwrap();
    assert!(matches!(ev.outage_exact(&params, 2), Err(Error::NumericalInconsistency { .. })));
}
