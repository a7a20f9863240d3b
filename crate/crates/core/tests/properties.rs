//! Property-based invariants over random fields and parameters.

use proptest::prelude::*;
use std::f64::consts::PI;
use uclab::field::{GridSpec, ScalarField};
use uclab::frequency::{exponents, spectrum_distance};
use uclab::gaussian::{moment, tail_bound};
use uclab::solver::random_trig_field;
use uclab::{doubling, vanishing};

fn field_strategy() -> impl Strategy<Value = (ScalarField, u64)> {
    (0u64..1000, 1usize..=6).prop_map(|(seed, cap)| {
        let grid = GridSpec::new(1, 64).unwrap();
        (random_trig_field(&grid, seed, 0, cap), seed)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn lp_norm_absolute_homogeneity((f, _) in field_strategy(), c in -50.0f64..50.0, p_sel in 0usize..4) {
        let p = [1.0, 2.0, 3.5, f64::INFINITY][p_sel];
        let base = f.lp_norm(p).unwrap();
        let scaled = f.scaled(c).lp_norm(p).unwrap();
        prop_assert!((scaled - c.abs() * base).abs() <= 1e-12 * (1.0 + scaled.abs()));
    }

    #[test]
    fn parseval_on_random_fields((f, _) in field_strategy()) {
        let l2 = f.lp_norm(2.0).unwrap();
        let spectral: f64 = f.spectral_coefficients().iter().map(|c| c.norm_sqr()).sum();
        prop_assert!((l2 * l2 - spectral).abs() <= 1e-12 * (1.0 + spectral));
    }

    #[test]
    fn poincare_on_zero_mean_fields((f, _) in field_strategy()) {
        // random trig fields are zero-mean by construction
        prop_assume!(f.lp_norm(2.0).unwrap() > 1e-12);
        let q = f.dirichlet_quotient().unwrap();
        prop_assert!(q >= 4.0 * PI * PI * (1.0 - 1e-10), "q = {q}");
    }

    #[test]
    fn gradient_is_linear((f, seed) in field_strategy(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let grid = f.spec().clone();
        let g = random_trig_field(&grid, seed ^ 0xabcdef, 1, 4);
        let combo = f.lin_comb(a, &g, b).gradient();
        let fa = f.gradient();
        let gb = g.gradient();
        let scale = combo.component(0).max_abs().max(1.0);
        for i in 0..grid.node_count() {
            let expect = a * fa.component(0).values()[i] + b * gb.component(0).values()[i];
            prop_assert!((combo.component(0).values()[i] - expect).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn ball_norm_below_full_norm((f, _) in field_strategy(), delta in 0.01f64..0.5, c in -0.5f64..0.5) {
        let full = f.lp_norm(2.0).unwrap();
        let ball = f.ball_l2_norm(&[c], delta).unwrap();
        prop_assert!(ball <= full * (1.0 + 1e-12));
    }

    #[test]
    fn moment_scaling_exponent(k in 0usize..3, l in 0u32..3, s in 0.05f64..5.0) {
        let mu = [2 * k]; // even order
        let base = moment(&mu, l, -1.0, None).unwrap();
        let v = moment(&mu, l, -s, None).unwrap();
        let expect = s.powf(l as f64 + k as f64) * base;
        prop_assert!((v - expect).abs() <= 1e-10 * base.abs().max(1e-30));
    }

    #[test]
    fn spectrum_distance_bounds(q in -10.0f64..20.0) {
        let d = spectrum_distance(q);
        prop_assert!(d >= 0.0);
        if q >= 0.0 {
            prop_assert!(d <= 0.25 + 1e-12);
            // distance vanishes exactly on the spectrum
            let m = (2.0 * q).round().max(0.0);
            prop_assert!((spectrum_distance(m / 2.0)).abs() < 1e-12);
        } else {
            prop_assert!((d + q).abs() < 1e-12);
        }
    }

    #[test]
    fn tail_bound_nonnegative_and_monotone(t in -0.5f64..-1e-4, r in 0.1f64..3.0, f_inf in 0.0f64..10.0) {
        let b1 = tail_bound(r, t, f_inf, 1).unwrap();
        let b2 = tail_bound(r + 0.1, t, f_inf, 1).unwrap();
        prop_assert!(b1 >= 0.0);
        prop_assert!(b2 <= b1 * (1.0 + 1e-12));
    }

    #[test]
    fn gamma_monotone_and_delta_admissible(m0 in 1.0f64..8.0, m1 in 1.0f64..8.0, delta0 in 0.05f64..0.5) {
        let e = exponents(1, f64::INFINITY, f64::INFINITY, m0, m1, None, None).unwrap();
        let g1 = doubling::gamma(0.2, &e).unwrap();
        let g2 = doubling::gamma(0.4, &e).unwrap();
        prop_assert!(g2 < g1);
        let choice = doubling::choose_delta(delta0, &e).unwrap();
        prop_assert!(choice.delta < delta0);
        prop_assert!(choice.delta < e.epsilon.sqrt());
        prop_assert!(choice.smallness_lhs >= choice.smallness_rhs);
    }

    #[test]
    fn observability_ratio_at_least_one((f, _) in field_strategy(), delta0 in 0.05f64..0.5) {
        let shifted = f.lin_comb(1.0, &ScalarField::constant(f.spec(), 2.0), 1.0);
        let r = doubling::observability_ratio(&shifted, delta0, &[0.0]).unwrap();
        prop_assert!(r.ratio >= 1.0 - 1e-12);
    }

    #[test]
    fn start_point_certificate_always_holds((f, _) in field_strategy(), eps in 0.005f64..0.1) {
        let shifted = f.lin_comb(1.0, &ScalarField::constant(f.spec(), 1.5), 1.0);
        prop_assume!(shifted.lp_norm(2.0).unwrap() > 1e-6);
        let sel = vanishing::select_start_point(&shifted, eps).unwrap();
        prop_assert!(sel.certified);
        prop_assert!(sel.achieved_ratio <= sel.bound * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn exponent_set_epsilon_range(m0 in 1.0f64..50.0, m1 in 1.0f64..50.0, p in 1.0f64..30.0, q in 2.1f64..40.0) {
        prop_assume!(p > 2.0 / 3.0 && q > 2.0);
        let e = exponents(1, p, q, m0, m1, None, None).unwrap();
        prop_assert!(e.epsilon > 0.0 && e.epsilon <= 0.5);
        prop_assert!(e.tau0 == (1.0 / e.epsilon).ln());
        prop_assert!(e.a > 0.0 && e.b > 0.0);
    }
}
