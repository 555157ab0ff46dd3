use num_complex::Complex64;
use proptest::prelude::*;

use cylhardy::combinatorics::{a_coeff, coeff_o, stirling2};
use cylhardy::corpus::TestFunction;
use cylhardy::geometry::Setting;
use cylhardy::jets::{bump_profile, check_operator_identities, jet_of, Step};
use cylhardy::quadrature::QuadratureSpec;
use cylhardy::verifiers::{cp_functional, verify_identity, verify_inequality, ExponentTuple, InequalityKind};
use num_bigint::BigUint;

fn complex() -> impl Strategy<Value = Complex64> {
    (-10.0..10.0f64, -10.0..10.0f64).prop_map(|(a, b)| Complex64::new(a, b))
}

proptest! {
    #[test]
    fn cp_is_nonnegative(u in complex(), v in complex(), p in 1.01..6.0f64) {
        let c = cp_functional(u, v, p);
        let scale = u.norm().powf(p) + (u - v).norm().powf(p) + v.norm().powf(p);
        prop_assert!(c >= -1e-12 * scale.max(1.0));
    }

    #[test]
    fn cp_jointly_homogeneous(u in complex(), v in complex(), p in 1.1..5.0f64, lam in complex()) {
        let a = cp_functional(lam * u, lam * v, p);
        let b = lam.norm().powf(p) * cp_functional(u, v, p);
        let scale = lam.norm().powf(p) * (u.norm().powf(p) + (u - v).norm().powf(p) + v.norm().powf(p));
        prop_assert!((a - b).abs() <= 1e-12 * scale.max(1e-300));
    }

    #[test]
    fn c2_is_square_modulus(u in complex(), v in complex()) {
        let c = cp_functional(u, v, 2.0);
        let scale = u.norm_sqr() + (u - v).norm_sqr() + v.norm_sqr();
        prop_assert!((c - v.norm_sqr()).abs() <= 4.0 * f64::EPSILON * scale);
    }

    #[test]
    fn o_triangle_recurrence(k in 2u32..25, m_off in 0u32..24) {
        let m = 2 + m_off % (k - 1);
        let lhs = BigUint::from(4 * k * (k + 1)) * coeff_o(k, m).unwrap() + BigUint::from(4u32) * coeff_o(k, m - 1).unwrap();
        prop_assert_eq!(lhs, coeff_o(k + 1, m).unwrap());
    }

    #[test]
    fn o_edges(k in 1u32..30) {
        prop_assert_eq!(coeff_o(k, 1).unwrap(), a_coeff(k).unwrap());
        prop_assert_eq!(coeff_o(k, k).unwrap(), BigUint::from(4u32).pow(k - 1));
        prop_assert_eq!(a_coeff(k + 1).unwrap(), BigUint::from(4 * k * (k + 1) + 1) * a_coeff(k).unwrap());
    }

    #[test]
    fn stirling_recurrence(m in 1u32..40, kappa in 1u32..40) {
        let rhs = BigUint::from(kappa) * stirling2(m - 1, kappa) + stirling2(m - 1, kappa - 1);
        prop_assert_eq!(stirling2(m, kappa), rhs);
    }

    #[test]
    fn quasi_norm_is_homogeneous(x1 in -5.0..5.0f64, x2 in -5.0..5.0f64, lam in 0.01..50.0f64) {
        prop_assume!(x1.abs() + x2.abs() > 1e-6);
        let s = Setting::homogeneous(vec![1, 2]).unwrap();
        let x = [x1, x2];
        let a = s.quasi_norm(&s.dilate(lam, &x));
        let b = lam * s.quasi_norm(&x);
        prop_assert!((a - b).abs() <= 1e-12 * b);
    }

    #[test]
    fn euler_then_logmult_is_first_tower_entry(c in 0.8..3.0f64, w in 0.1..0.7f64, t in -0.95..0.95f64) {
        let g = bump_profile(c, w).unwrap();
        let r = c + t * w;
        let jet = jet_of(&g, r, 4).unwrap();
        let tower = jet.logeuler_tower();
        let step = jet.apply_step(Step::Euler).unwrap().apply_step(Step::LogMult).unwrap();
        let d = step.value() - tower[1];
        prop_assert!(d.norm() <= 1e-12 * (1.0 + tower[1].norm()));
    }

    #[test]
    fn balanced_tuples_from_free_parameters(p in 1.1..4.0f64, q in 1.0..4.0f64, delta in 0.0..1.0f64, b in -2.0..2.0f64, d in 1.0..6.0f64) {
        if let Ok(e) = ExponentTuple::from_free(p, q, delta, b, d) {
            prop_assert!((e.delta * e.r / e.p + (1.0 - e.delta) * e.r / e.q - 1.0).abs() < 1e-12);
            prop_assert!((e.c - (-(d / p) * delta + b * (1.0 - delta))).abs() < 1e-12);
        }
    }

    #[test]
    fn setting_labels_round_trip(n in 1usize..7, big_n_off in 0usize..6) {
        let big_n = 1 + big_n_off % n;
        let s = Setting::euclidean(n, big_n).unwrap();
        prop_assert_eq!(Setting::parse(&s.to_string()).unwrap(), s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn operator_identities_on_random_bumps(c in 0.8..3.0f64, w in 0.1..0.7f64) {
        let g = bump_profile(c, w).unwrap();
        let radii: Vec<f64> = (1..10).map(|i| c - w + 2.0 * w * i as f64 / 10.0).collect();
        let rep = check_operator_identities(&g, 6, &radii).unwrap();
        prop_assert!(rep.max_residual() <= 1e-9);
    }

    #[test]
    fn identity_holds_and_scales(c in 0.7..3.0f64, w_frac in 0.1..0.9f64, p in 1.2..4.0f64, lam in 0.1..10.0f64) {
        let w = w_frac * c.min(1.5);
        let s = Setting::euclidean(2, 2).unwrap();
        let f = TestFunction::radial_only("bump", bump_profile(c, w).unwrap());
        let spec = QuadratureSpec::default();
        let a = verify_identity(&f, p, &s, &spec).unwrap();
        prop_assert!(a.passed(), "{:?}", a);
        let b = verify_identity(&f.scaled(Complex64::new(lam, 0.0)), p, &s, &spec).unwrap();
        prop_assert!(b.passed());
        prop_assert!((b.lhs - lam.powf(p) * a.lhs).abs() <= 1e-10 * b.lhs.abs());
    }

    #[test]
    fn sobolev_holds_on_random_bumps(c in 0.7..3.0f64, w_frac in 0.1..0.9f64, p in 1.2..4.0f64) {
        let w = w_frac * c.min(1.5);
        let s = Setting::euclidean(1, 1).unwrap();
        let f = TestFunction::radial_only("bump", bump_profile(c, w).unwrap());
        let rec = verify_inequality(&f, InequalityKind::CriticalSobolev, p, &s, &QuadratureSpec::default()).unwrap();
        prop_assert!(rec.passed() && rec.slack() >= -1e-9, "{:?}", rec);
    }
}
