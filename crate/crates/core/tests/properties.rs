//! Property tests for the invariants of the exact-formula layer, the
//! engines and the harness.

use frachardy::constants::{remainder_c_p, sharp_constant_point};
use frachardy::functions::{make_bump, make_radial, Profile};
use frachardy::params::critical_exponent;
use frachardy::quadrature::{gagliardo_radial, QuadratureSpec};
use frachardy::special_fns::{
    check_power_sum_inequality, check_split_inequality, french_power, phi_kernel, sphere_surface, KernelParams,
};
use frachardy::verify::{
    check_hardy, check_hardy_sobolev, duality_check, passes, HardySobolevForm, VerificationReport,
};
use frachardy::{HardyParams, Regime, SobolevParams, SobolevVariant};
use proptest::prelude::*;

fn admissible(d: usize, s: f64, p: f64, k: usize, a: f64, b: f64) -> Option<HardyParams> {
    HardyParams::new(d, s, p, k, a, b).ok().filter(|h| h.require_nondegenerate().is_ok())
}

proptest! {
    #[test]
    fn pass_rule_matches_three_sigma(margin in -10.0..10.0f64, sigma in 0.0..5.0f64) {
        prop_assert_eq!(passes(margin, sigma), margin >= -3.0 * sigma);
    }

    #[test]
    fn french_power_is_odd(a in -50.0..50.0f64, t in 0.01..4.0f64) {
        prop_assert_eq!(french_power(-a, t), -french_power(a, t));
        prop_assert!((french_power(a, t).abs() - a.abs().powf(t)).abs() <= 1e-12 * a.abs().powf(t).max(1.0));
    }

    #[test]
    fn sphere_surface_matches_gamma_formula(m in 0usize..12) {
        let direct = 2.0 * std::f64::consts::PI.powf((m as f64 + 1.0) / 2.0)
            / frachardy::special_fns::gamma_fn((m as f64 + 1.0) / 2.0).unwrap();
        let v: f64 = sphere_surface(m);
        prop_assert!((v / direct - 1.0).abs() < 1e-13);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn split_inequality_never_fails(
        a in -100.0..100.0f64, b in -100.0..100.0f64, q in 1.0001..6.0f64, c in 1.0001..20.0f64,
    ) {
        prop_assert!(check_split_inequality(a, b, q, c).unwrap());
    }

    #[test]
    fn power_sum_inequality_never_fails(v in prop::collection::vec(-10.0..10.0f64, 1..20), g in 1.0..5.0f64) {
        prop_assert!(check_power_sum_inequality(&v, g).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kernel_increases_in_r(d in 1usize..5, s in 0.05..0.95f64, p in 1.0..3.0f64, r in 0.0..0.95f64) {
        let kp = KernelParams::new(d, s, p).unwrap();
        let lo = phi_kernel(&kp, r).unwrap();
        let hi = phi_kernel(&kp, r + 0.04).unwrap();
        prop_assert!(hi > lo);
    }

    #[test]
    fn three_dimensional_kernel_matches_closed_form(s in 0.05..0.95f64, p in 1.0..3.0f64, r in 0.1..0.9f64) {
        let sp = s * p;
        let kp = KernelParams::new(3, s, p).unwrap();
        let exact = 2.0 * std::f64::consts::PI * ((1.0 - r).powf(-1.0 - sp) - (1.0 + r).powf(-1.0 - sp))
            / (r * (1.0 + sp));
        prop_assert!((phi_kernel(&kp, r).unwrap() / exact - 1.0).abs() < 1e-9);
    }

    #[test]
    fn point_constant_is_symmetric(d in 1usize..4, s in 0.2..0.8f64, a in -0.4..0.4f64, b in -0.4..0.4f64) {
        prop_assume!(admissible(d, s, 2.0, d, a, b).is_some());
        let ab = sharp_constant_point(d, s, 2.0, a, b).unwrap().value;
        let ba = sharp_constant_point(d, s, 2.0, b, a).unwrap().value;
        prop_assert!((ab / ba - 1.0).abs() < 1e-12);
    }

    #[test]
    fn remainder_constant_lies_in_unit_interval(p in 2.0..8.0f64) {
        let c = remainder_c_p(p).unwrap();
        prop_assert!(c > 0.0 && c <= 1.0);
    }

    #[test]
    fn gamma_and_regime_follow_the_tuple(
        d in 1usize..4, s in 0.1..0.9f64, p in 1.2..3.0f64, a in -0.5..0.5f64, b in -0.5..0.5f64,
    ) {
        let hp = HardyParams::new(d, s, p, d, a, b);
        let ok = a > -(d as f64) && a < s * p && b > -(d as f64) && b < s * p
            && a + b > -(d as f64) && a + b < s * p;
        prop_assert_eq!(hp.is_ok(), ok);
        if let Ok(hp) = hp {
            prop_assert!((hp.gamma() - (d as f64 + a + b - s * p) / p).abs() < 1e-14);
            let sub = s * p < d as f64 + a + b;
            prop_assert_eq!(hp.regime() == Regime::Subcritical, sub && hp.gamma() != 0.0);
        }
    }

    #[test]
    fn theta_vanishes_at_the_critical_exponent(s in 0.1..0.9f64, p in 1.5..3.0f64) {
        let hp = HardyParams::new(3, s, p, 1, 0.0, 0.0).unwrap();
        prop_assume!(hp.require_nondegenerate().is_ok());
        let q = critical_exponent(3, s * p, p).unwrap();
        let sob = SobolevParams::new(hp, q, SobolevVariant::Flat).unwrap();
        prop_assert_eq!(sob.theta(), 0.0);
        let sub = SobolevParams::new(hp, 0.5 * (p + q), SobolevVariant::Flat).unwrap();
        prop_assert!((sub.theta() - (3.0 + (s * p - 3.0) * 0.5 * (p + q) / p)).abs() < 1e-12);
    }

    #[test]
    fn inversion_duality_preserves_the_constant(
        d in 1usize..4, s in 0.2..0.9f64, p in 1.5..3.0f64, a in -1.5..0.5f64, b in -1.5..0.5f64,
    ) {
        let hp = admissible(d, s, p, d, a, b);
        prop_assume!(hp.is_some());
        let hp = hp.unwrap();
        let dual = hp.inversion_dual();
        prop_assume!(dual.is_ok_and(|h| h.require_nondegenerate().is_ok()));
        let out = duality_check(&hp).unwrap();
        prop_assert_eq!(out.agrees, Some(true), "rel diff {:?}", out.rel_diff);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn radial_seminorm_scales_with_dilation(
        d in 1usize..4, s in 0.2..0.8f64, a in -0.3..0.3f64, b in -0.3..0.3f64, lambda in 0.3..3.0f64,
    ) {
        let hp = admissible(d, s, 2.0, d, a, b);
        prop_assume!(hp.is_some_and(|h| h.regime() == Regime::Subcritical));
        let hp = hp.unwrap();
        let u = make_radial(d, Profile::Bump { radius: 1.0, m: 2 }).unwrap();
        let spec = QuadratureSpec::radial(1e-7);
        let base = gagliardo_radial(&u, &hp, &spec).unwrap().value;
        let scaled = gagliardo_radial(&u.dilate(lambda), &hp, &spec).unwrap().value;
        let expected = base * lambda.powf(hp.sp() - d as f64 - a - b);
        prop_assert!((scaled / expected - 1.0).abs() < 1e-4, "{scaled} vs {expected}");
    }

    #[test]
    fn reports_are_reproducible_and_round_trip(seed in any::<u64>(), x in 0.7..1.2f64, y in -0.4..0.4f64) {
        let hp = HardyParams::new(2, 0.6, 2.0, 1, 0.0, 0.0).unwrap();
        let u = make_bump(vec![x, y], 0.4, 2).unwrap();
        let spec = QuadratureSpec::monte_carlo(5_000, seed);
        let a = check_hardy(&u, &hp, &spec).unwrap();
        let b = check_hardy(&u, &hp, &spec).unwrap();
        let ja = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(&ja, &serde_json::to_string(&b).unwrap());
        let back: VerificationReport = serde_json::from_str(&ja).unwrap();
        prop_assert_eq!(back, a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(3))]

    #[test]
    fn hardy_sobolev_ratio_is_dilation_invariant(x in 0.8..1.2f64, y in -0.3..0.3f64, big in any::<bool>()) {
        let hp = HardyParams::new(2, 0.6, 2.0, 1, 0.0, 0.0).unwrap();
        let sob = SobolevParams::new(hp, 3.0, SobolevVariant::Flat).unwrap();
        let u = make_bump(vec![x, y], 0.4, 2).unwrap();
        let lambda = if big { 2.0 } else { 0.5 };
        let spec = QuadratureSpec::monte_carlo(200_000, 9);
        let r1 = check_hardy_sobolev(&u, &sob, &spec, HardySobolevForm::Ineq1).unwrap();
        let r2 = check_hardy_sobolev(&u.dilate(lambda), &sob, &spec, HardySobolevForm::Ineq1).unwrap();
        let (a, b) = (r1.empirical_ratio.unwrap(), r2.empirical_ratio.unwrap());
        let sigma = r1.ratio_sigma.unwrap().hypot(r2.ratio_sigma.unwrap());
        prop_assert!((a - b).abs() <= 3.0 * sigma, "{a} vs {b} (sigma {sigma})");
    }
}
