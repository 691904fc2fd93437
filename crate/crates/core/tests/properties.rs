use invgen_core::fourier::{
    apply_multiplier, forward_ft, inverse_ft, make_osc_multiplier,
    make_regularized_semigroup_multiplier, reflect_multiplier,
};
use invgen_core::oscillatory::{eval_G, Phase};
use invgen_core::quad::integrate_finite;
use invgen_core::semigroup::shift;
use invgen_core::signal::{interpolation_inequality_check, Grid, LebesgueExponent, Signal};
use invgen_core::testfam::{eval_f_I, norm_f_I, Interval};
use num_complex::Complex64;
use proptest::prelude::*;

fn p(v: f64) -> LebesgueExponent {
    LebesgueExponent::new(v).unwrap()
}

/// Sum of up to three modulated Gaussians on `[-8, 8)` with 256 points.
fn packet() -> impl Strategy<Value = Signal> {
    prop::collection::vec(
        (-3.0..3.0f64, 0.3..2.0f64, -4.0..4.0f64, -1.0..1.0f64, -1.0..1.0f64),
        1..4,
    )
    .prop_map(|parts| {
        let g = Grid::new(8.0, 256).unwrap();
        Signal::from_fn(g, |x| {
            parts
                .iter()
                .map(|&(c, w, k, re, im)| {
                    let env = (-((x - c) / w).powi(2)).exp();
                    Complex64::new(re, im) * Complex64::cis(2.0 * std::f64::consts::PI * k * x) * env
                })
                .sum()
        })
        .unwrap()
    })
    .prop_filter("nonzero", |f| f.lp_norm(LebesgueExponent::new(2.0).unwrap()) > 1e-3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn plancherel(f in packet()) {
        let a = f.lp_norm(p(2.0));
        let b = forward_ft(&f).lp_norm(p(2.0));
        prop_assert!((a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn transform_round_trip(f in packet()) {
        let back = inverse_ft(&forward_ft(&f));
        prop_assert!(back.difference(&f).unwrap().lp_norm(p(2.0)) <= 1e-12 * f.lp_norm(p(2.0)));
    }

    #[test]
    fn norm_is_homogeneous(f in packet(), re in -3.0..3.0f64, im in -3.0..3.0f64, pv in 1.2..8.0f64) {
        let c = Complex64::new(re, im);
        let lhs = f.scaled(c).lp_norm(p(pv));
        let rhs = c.norm() * f.lp_norm(p(pv));
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
    }

    #[test]
    fn bounded_symbol_dominates_l2(f in packet(), t in 0.0..3.0f64, eps in 0.0..3.0f64) {
        let m = make_regularized_semigroup_multiplier(t, eps).unwrap();
        let out = apply_multiplier(&m, &f).unwrap().lp_norm(p(2.0));
        prop_assert!(out <= m.bound() * f.lp_norm(p(2.0)) * (1.0 + 1e-12));
    }

    #[test]
    fn damped_semigroup_contracts_l2(f in packet(), t in 0.01..3.0f64, eps in 0.01..3.0f64) {
        let m = make_regularized_semigroup_multiplier(t, eps).unwrap();
        let out = apply_multiplier(&m, &f).unwrap().lp_norm(p(2.0));
        prop_assert!(out <= f.lp_norm(p(2.0)) * (1.0 + 1e-12));
    }

    #[test]
    fn reflection_identity(f in packet(), t in -3.0..3.0f64) {
        let m = make_osc_multiplier(t).unwrap();
        let lhs = apply_multiplier(&reflect_multiplier(&m), &f).unwrap();
        let rhs = apply_multiplier(&m, &f.reflected()).unwrap().reflected();
        prop_assert!(lhs.difference(&rhs).unwrap().lp_norm(p(2.0)) <= 1e-12 * f.lp_norm(p(2.0)));
    }

    #[test]
    fn shift_group_law(s1 in -2.0..2.0f64, s2 in -2.0..2.0f64) {
        let g = Grid::new(16.0, 512).unwrap();
        let f = Signal::from_fn(g, |x| Complex64::new((-x * x).exp(), 0.0)).unwrap();
        let a = shift(&shift(&f, s1), s2);
        let b = shift(&f, s1 + s2);
        prop_assert!(a.difference(&b).unwrap().lp_norm(p(2.0)) <= 1e-12 * f.lp_norm(p(2.0)));
    }

    #[test]
    fn interpolation_chain(f in packet(), pv in 2.01..12.0f64) {
        let c = interpolation_inequality_check(&f, p(pv)).unwrap();
        prop_assert!(c.holds, "lhs {} rhs {}", c.lhs, c.rhs);
    }

    #[test]
    fn quadrature_is_additive(a in -3.0..0.0f64, b in 0.0..3.0f64, k in 0.5..6.0f64) {
        let f = |x: f64| Complex64::new((k * x).sin() * (-x * x).exp(), x.cos());
        let whole = integrate_finite(f, a - 0.5, b + 0.5, 1e-13).unwrap().value;
        let left = integrate_finite(f, a - 0.5, 0.1 * a, 1e-13).unwrap().value;
        let right = integrate_finite(f, 0.1 * a, b + 0.5, 1e-13).unwrap().value;
        prop_assert!((whole - left - right).norm() <= 1e-11);
    }

    #[test]
    fn quadrature_tightening_does_not_move_far(k in 1.0..40.0f64) {
        let f = |x: f64| Complex64::cis(k * x * x);
        let exact = integrate_finite(f, 0.0, 2.0, 1e-14).unwrap();
        let mut prev = f64::INFINITY;
        for tol in [1e-4, 1e-7, 1e-10] {
            let r = integrate_finite(f, 0.0, 2.0, tol).unwrap();
            let err = (r.value - exact.value).norm();
            prop_assert!(err <= 10.0 * tol + 1e-13);
            prop_assert!(r.error_estimate <= prev);
            prev = r.error_estimate.max(tol);
        }
    }

    #[test]
    fn f_i_norm_scaling(a in 0.05..2.0f64, len in 0.05..2.0f64, lambda in 0.1..10.0f64, pv in 1.5..8.0f64) {
        let i = Interval::new(a, a + len).unwrap();
        let lhs = norm_f_I(&i.dilate(lambda).unwrap(), p(pv)).unwrap();
        let rhs = lambda.powf(1.0 - 1.0 / pv) * norm_f_I(&i, p(pv)).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
    }

    #[test]
    fn f_i_modulus_is_translation_invariant(a in -5.0..5.0f64, len in 0.1..3.0f64, s in -5.0..5.0f64, x in -50.0..50.0f64) {
        let i = Interval::new(a, a + len).unwrap();
        let j = Interval::new(a + s, a + s + len).unwrap();
        prop_assert!((eval_f_I(&i, x).norm() - eval_f_I(&j, x).norm()).abs() <= 1e-12);
    }

    #[test]
    fn g_conjugate_symmetry(a in 0.2..1.0f64, len in 0.1..1.0f64, t in 0.1..5.0f64, y in -20.0..20.0f64) {
        let i = Interval::new(a, a + len).unwrap();
        let g = eval_G(&i, &Phase::new(t, y).unwrap()).unwrap();
        let h = eval_G(&i, &Phase::new(-t, -y).unwrap()).unwrap();
        prop_assert!((g - h.conj()).norm() <= 1e-10 * len);
        prop_assert!(g.norm() <= len * (1.0 + 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn sinc_power_integral_decreases_in_p(p0 in 1.2..8.0f64, dp in 0.01..1.0f64) {
        let a = invgen_core::testfam::compute_Np(p(p0)).unwrap().powf(p0);
        let b = invgen_core::testfam::compute_Np(p(p0 + dp)).unwrap().powf(p0 + dp);
        prop_assert!(b < a, "p = {p0}: {a} vs {}: {b}", p0 + dp);
    }
}
