use frailhaz_core::adjust::{
    asymptotic_marginal, causal_from_marginal, causal_from_marginal_numeric, marginal_from_causal,
};
use frailhaz_core::solver::solve_with_hazard;
use frailhaz_core::{CumulativeHazard, FrailtySummary, HazardRatio, PvfFamily, PvfParams};
use proptest::prelude::*;

fn family() -> impl Strategy<Value = PvfFamily> {
    prop_oneof![
        Just(PvfFamily::Gamma),
        Just(PvfFamily::InverseGaussian),
        (-0.95f64..-0.05).prop_map(|m| PvfFamily::hougaard(m).unwrap()),
        (0.02f64..0.6).prop_map(|q| PvfFamily::compound_poisson(q).unwrap()),
    ]
}

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn survival_inversion_round_trip(family in family(), nu in log_uniform(0.05, 20.0), h in log_uniform(1e-3, 5.0)) {
        let p = PvfParams::new(family, nu).unwrap();
        let s = p.survival(CumulativeHazard::new(h).unwrap());
        prop_assume!(s < 1.0 && s > family.survival_floor() + 1e-9);
        let back = p.invert_survival(s).unwrap().value();
        // The survival function flattens near the floor, so compare in S as well.
        let s_back = p.survival(CumulativeHazard::new(back).unwrap());
        prop_assert!((back - h).abs() <= 1e-10 * h || (s_back - s).abs() <= 1e-15, "h={h} back={back}");
    }

    #[test]
    fn survival_is_decreasing_and_bounded(family in family(), nu in log_uniform(0.05, 20.0), h in log_uniform(1e-3, 50.0)) {
        let p = PvfParams::new(family, nu).unwrap();
        let s1 = p.survival(CumulativeHazard::new(h).unwrap());
        let s2 = p.survival(CumulativeHazard::new(h * 1.5).unwrap());
        prop_assert!(s2 <= s1);
        prop_assert!(s1 < 1.0 && s2 >= family.survival_floor());
    }

    #[test]
    fn trr_exceeds_one_and_is_below_inverse_survival(family in family(), nu in log_uniform(0.05, 20.0), h in log_uniform(1e-3, 5.0)) {
        let p = PvfParams::new(family, nu).unwrap();
        let h = CumulativeHazard::new(h).unwrap();
        let trr = p.trr(h);
        prop_assert!(trr > 1.0);
        prop_assert!(trr <= 1.0 / p.survival(h) * (1.0 + 1e-12));
    }

    #[test]
    fn adjustment_round_trip(family in family(), nu in log_uniform(0.05, 20.0), h in log_uniform(1e-3, 5.0), r in log_uniform(0.2, 5.0)) {
        let p = PvfParams::new(family, nu).unwrap();
        if p.m() > 0.0 {
            // only the increasing branch of the marginal map is invertible
            prop_assume!(r < 0.99 * nu / (p.m() * h));
        }
        let h = CumulativeHazard::new(h).unwrap();
        let r_mar = marginal_from_causal(&p, h, HazardRatio::new(r).unwrap());
        let back = causal_from_marginal(&p, h, r_mar).unwrap().value();
        prop_assert!((back - r).abs() <= 1e-8 * r, "r={r} back={back}");
    }

    #[test]
    fn gamma_closed_form_matches_numeric(nu in log_uniform(0.05, 20.0), h in log_uniform(1e-3, 5.0), r in log_uniform(0.2, 5.0)) {
        let p = PvfParams::new(PvfFamily::Gamma, nu).unwrap();
        let h = CumulativeHazard::new(h).unwrap();
        let r_mar = marginal_from_causal(&p, h, HazardRatio::new(r).unwrap());
        let closed = causal_from_marginal(&p, h, r_mar).unwrap().value();
        let numeric = causal_from_marginal_numeric(nu, 0.0, h.value(), r_mar.value()).unwrap();
        prop_assert!((closed - numeric).abs() <= 1e-5 * closed);
    }

    #[test]
    fn inverse_gaussian_quadratic_matches_numeric(nu in log_uniform(0.05, 20.0), h in log_uniform(1e-3, 5.0), r_mar in log_uniform(0.2, 5.0)) {
        let p = PvfParams::new(PvfFamily::InverseGaussian, nu).unwrap();
        let h = CumulativeHazard::new(h).unwrap();
        let quad = causal_from_marginal(&p, h, HazardRatio::new(r_mar).unwrap()).unwrap().value();
        let numeric = causal_from_marginal_numeric(nu, -0.5, h.value(), r_mar).unwrap();
        prop_assert!((quad - numeric).abs() <= 1e-8 * quad);
    }

    #[test]
    fn null_is_preserved_exactly(family in family(), nu in log_uniform(0.05, 20.0), h in log_uniform(1e-3, 5.0)) {
        let p = PvfParams::new(family, nu).unwrap();
        let h = CumulativeHazard::new(h).unwrap();
        prop_assert_eq!(marginal_from_causal(&p, h, HazardRatio::ONE), HazardRatio::ONE);
        prop_assert_eq!(causal_from_marginal(&p, h, HazardRatio::ONE).unwrap(), HazardRatio::ONE);
    }

    #[test]
    fn non_null_stays_non_null(family in family(), nu in log_uniform(0.05, 20.0), h in log_uniform(1e-3, 5.0), r in log_uniform(0.2, 0.95)) {
        let p = PvfParams::new(family, nu).unwrap();
        let h = CumulativeHazard::new(h).unwrap();
        prop_assert!(marginal_from_causal(&p, h, HazardRatio::new(r).unwrap()) != HazardRatio::ONE);
    }

    #[test]
    fn marginal_tends_to_asymptote(family in family(), nu in log_uniform(0.05, 20.0), r in log_uniform(0.2, 5.0)) {
        let p = PvfParams::new(family, nu).unwrap();
        // The gap closes like (m + 1) (1 - 1/r) nu / H0; steep compound Poisson members need more time.
        prop_assume!((p.m() + 1.0) * (1.0 - 1.0 / r).abs() * nu / 1e6 < 1e-4);
        let r = HazardRatio::new(r).unwrap();
        let far = marginal_from_causal(&p, CumulativeHazard::new(1e6).unwrap(), r).value();
        let limit = asymptotic_marginal(&p, r).value();
        prop_assert!((far - limit).abs() < 1e-3 * limit.max(1.0), "{far} vs {limit}");
    }

    #[test]
    fn truncation_attenuates_protective_effect_for_gamma(nu in log_uniform(0.05, 20.0), h in log_uniform(1e-3, 5.0), r in log_uniform(0.2, 0.99)) {
        let p = PvfParams::new(PvfFamily::Gamma, nu).unwrap();
        let r_mar = marginal_from_causal(&p, CumulativeHazard::new(h).unwrap(), HazardRatio::new(r).unwrap()).value();
        prop_assert!(r_mar > r && r_mar < 1.0);
    }

    #[test]
    fn solver_round_trip(family in family(), nu in log_uniform(0.05, 20.0), h in log_uniform(1e-2, 2.0)) {
        let truth = PvfParams::new(family, nu).unwrap();
        let h = CumulativeHazard::new(h).unwrap();
        let (s, trr) = (truth.survival(h), truth.trr(h));
        prop_assume!(trr > 1.0 + 1e-6);
        let summary = FrailtySummary::new(trr, s).unwrap();
        let (p, h_back) = solve_with_hazard(family, &summary).unwrap();
        prop_assert!((p.nu() - nu).abs() <= 1e-5 * nu, "nu={nu} got {}", p.nu());
        prop_assert!((h_back.value() - h.value()).abs() <= 1e-5 * h.value());
    }
}
