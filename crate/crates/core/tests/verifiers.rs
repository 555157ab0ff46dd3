//! Verifier examples checked against independent quadrature in test code.

use cylhardy::combinatorics::{a_coeff, coeff_o, to_f64_exact};
use cylhardy::corpus::{build_corpus, CorpusOptions, TestFunction};
use cylhardy::jets::{bump_profile, jet_of};
use cylhardy::quadrature::{integrate_box, Axis, QuadratureSpec};
use cylhardy::verifiers::*;
use cylhardy::{geometry::Setting, Error};
use std::f64::consts::PI;

/// Composite Simpson with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// `(g, r g′)` for the bump `exp(1 − 1/(1 − t²))`, written out by hand.
fn bump_and_euler(c: f64, w: f64, r: f64) -> (f64, f64) {
    let t = (r - c) / w;
    if t.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let s = 1.0 - t * t;
    let g = (1.0 - 1.0 / s).exp();
    (g, r * g * (-2.0 * t / (s * s)) / w)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

#[test]
fn identity_p2_bump_three_paths() {
    let s = Setting::euclidean(2, 2).unwrap();
    let f = TestFunction::radial_only("bump", bump_profile(2.0, 0.5).unwrap());
    let t = identity_terms(&f, 2.0, &s, &spec()).unwrap();
    let n = 40_000;
    let lhs = 2.0 * PI * simpson(|r| bump_and_euler(2.0, 0.5, r).0.powi(2) / r, 1.5, 2.5, n);
    let main = 4.0 * 2.0 * PI * simpson(|r| (r.ln() * bump_and_euler(2.0, 0.5, r).1).powi(2) / r, 1.5, 2.5, n);
    let rem = 2.0 * PI
        * simpson(
            |r| {
                let (g, e) = bump_and_euler(2.0, 0.5, r);
                (g + 2.0 * r.ln() * e).powi(2) / r
            },
            1.5,
            2.5,
            n,
        );
    assert!(rel(t.lhs.value, lhs) < 1e-9);
    assert!(rel(t.main.value, main) < 1e-9);
    assert!(rel(t.remainder.value, rem) < 1e-9);
    assert!(rel(lhs, main - rem) < 1e-8);
    let rec = verify_identity(&f, 2.0, &s, &spec()).unwrap();
    assert!(rec.passed() && rec.residual <= 1e-8, "{rec:?}");
}

#[test]
fn zero_function_identities() {
    let s = Setting::euclidean(3, 2).unwrap();
    let z = TestFunction::zero();
    let rec = verify_identity(&z, 3.0, &s, &spec()).unwrap();
    assert_eq!((rec.lhs, rec.rhs, rec.residual), (0.0, 0.0, 0.0));
    let rec = verify_higher_order_identity(&z, 2, &s, &spec()).unwrap();
    assert_eq!((rec.lhs, rec.rhs), (0.0, 0.0));
    let rec = verify_inequality(&z, InequalityKind::CriticalSobolev, 2.0, &s, &spec()).unwrap();
    assert!(rec.passed() && rec.slack() == 0.0);
    let rec = verify_uncertainty(&z, UncertaintyKind::Critical, &s, &spec()).unwrap();
    assert!(rec.passed() && rec.slack() == 0.0);
}

#[test]
fn homogeneous_identity_cancels_sigma() {
    let s = Setting::homogeneous(vec![1, 2]).unwrap();
    let f = TestFunction::radial_only("bump", bump_profile(1.4, 0.6).unwrap());
    let rec = verify_identity(&f, 3.0, &s, &spec()).unwrap();
    assert!(rec.passed() && rec.residual <= 1e-7, "{rec:?}");
    assert!((rec.sigma_power - 1.0).abs() < 1e-15);
}

#[test]
fn first_order_case_of_higher_identity() {
    let s = Setting::euclidean(2, 2).unwrap();
    let f = TestFunction::radial_only("bump", bump_profile(1.1, 0.5).unwrap());
    let h = higher_order_terms(&f, 1, &s, &spec()).unwrap();
    let t = identity_terms(&f, 2.0, &s, &spec()).unwrap();
    assert!(rel(h.lhs.value, t.main.value) < 1e-12);
    assert!(rel(h.base.value, t.lhs.value) < 1e-12);
    assert!(rel(h.weighted_terms[0].value, t.remainder.value) < 1e-12);
    let rec = verify_higher_order_identity(&f, 1, &s, &spec()).unwrap();
    assert!(rec.residual <= 1e-8);
}

#[test]
fn second_order_inner_sum() {
    // B_2 = S(1,1) L E g + (S(2,1) L E g + S(2,2) L² E² g) with weights O(2,·)/a_2.
    let s = Setting::euclidean(1, 1).unwrap();
    let g = bump_profile(1.3, 0.6).unwrap();
    let f = TestFunction::radial_only("bump", g.clone());
    let h = higher_order_terms(&f, 2, &s, &spec()).unwrap();
    let a2 = to_f64_exact(&a_coeff(2).unwrap()).unwrap();
    let o22 = to_f64_exact(&coeff_o(2, 2).unwrap()).unwrap();
    assert_eq!((a2, o22), (9.0, 4.0));
    let term = |r: f64| {
        let j = jet_of(&g, r, 2).unwrap();
        let e1 = j.euler_power(1).unwrap().value();
        let e2 = j.euler_power(2).unwrap().value();
        let l = r.ln();
        (e1 * (3.0 * l) + e2 * (2.0 * l * l)).norm_sqr() / r
    };
    let oracle = 2.0 * o22 / a2 * simpson(term, 0.7, 1.9, 40_000);
    assert!(rel(h.weighted_terms[1].value, oracle) < 1e-9, "{} vs {oracle}", h.weighted_terms[1].value);
    let rec = verify_higher_order_identity(&f, 2, &s, &spec()).unwrap();
    assert!(rec.passed() && rec.residual <= 1e-6);
}

#[test]
fn sobolev_slack_matches_identity() {
    let s = Setting::euclidean(2, 2).unwrap();
    let corpus = build_corpus(3, 4, &s, CorpusOptions { complex: true, nonseparable: false }).unwrap();
    for f in &corpus {
        let rec = verify_inequality(f, InequalityKind::CriticalSobolev, 2.0, &s, &spec()).unwrap();
        assert!(rec.passed() && rec.slack() >= 0.0);
        let rem = rec.remainder.unwrap();
        assert!(rel(rec.lhs.powi(2) + rem, rec.rhs.powi(2)) < 1e-8, "{rec:?}");
    }
}

#[test]
fn ckn_edge_cases() {
    let s = Setting::euclidean(3, 2).unwrap();
    let corpus = build_corpus(5, 3, &s, CorpusOptions { complex: true, nonseparable: true }).unwrap();
    let trivial = ExponentTuple::from_free(2.0, 3.0, 0.0, 0.2, 2.0).unwrap();
    let full = ExponentTuple::from_free(3.0, 2.0, 1.0, 0.2, 2.0).unwrap();
    let holder = ExponentTuple::from_free(2.0, 2.0, 0.5, -1.0, 2.0).unwrap();
    for f in &corpus {
        let r0 = verify_ckn(f, &trivial, &s, &spec()).unwrap();
        assert!(r0.passed() && r0.residual <= 1e-12);
        let r1 = verify_ckn(f, &full, &s, &spec()).unwrap();
        assert!(r1.passed() && r1.residual <= 1e-7);
        let rh = verify_ckn(f, &holder, &s, &spec()).unwrap();
        assert!(rh.passed() && rh.residual <= 1e-7, "{rh:?}");
    }
}

#[test]
fn unbalanced_tuple_is_a_hypothesis_violation() {
    assert!(matches!(ExponentTuple::new(2.0, 2.0, 3.0, 0.5, 0.0, -0.5, 2.0), Err(Error::Hypothesis(_))));
}

#[test]
fn planar_uncertainty_on_corpus() {
    let s = Setting::euclidean(2, 2).unwrap();
    let corpus = build_corpus(11, 5, &s, CorpusOptions { complex: true, nonseparable: true }).unwrap();
    for f in &corpus {
        let rec = verify_uncertainty(f, UncertaintyKind::Critical, &s, &spec()).unwrap();
        assert!(rec.passed() && rec.residual >= -1e-9);
    }
    let bad = Setting::euclidean(3, 1).unwrap();
    assert!(verify_uncertainty(&corpus[0], UncertaintyKind::Critical, &bad, &spec()).is_err());
}

#[test]
fn sweep_bound_and_monotonicity() {
    let r = sharpness_sweep(SweepStatement::CriticalSobolev { p: 2.0 }, 0.1, &[1e-1, 1e-2, 1e-4], 0.01, &spec()).unwrap();
    assert!(r.passed(), "{r:?}");
    assert!(r.rows[1].ratio < r.rows[0].ratio);
    assert!(r.rows[2].ratio <= 1.01);
    assert!(r.to_csv().starts_with("epsilon,ratio,model_prediction\n"));
}

#[test]
fn pure_log_power_quotient() {
    for (p, a) in [(2.0, -0.7), (3.0, -0.5), (1.5, -1.2)] {
        let (got, closed) = log_power_quotient(p, a, 2.0, 10.0, &spec()).unwrap();
        assert!(rel(got, closed) < 1e-9);
        assert!(rel(closed, (p * f64::abs(a)).powf(p)) < 1e-15);
    }
}

#[test]
fn polar_decomposition_matches_tensor_quadrature() {
    let g = bump_profile(2.0, 0.5).unwrap();
    let reduced = 2.0 * PI * simpson(|r| bump_and_euler(2.0, 0.5, r).0 * r, 1.5, 2.5, 20_000);
    let tensor = integrate_box(
        |x: &[f64]| g.eval(x[0].hypot(x[1])).unwrap().re,
        &[Axis::with_splits(-2.5, 2.5, vec![-1.5, 1.5]), Axis::with_splits(-2.5, 2.5, vec![-1.5, 1.5])],
        &QuadratureSpec { rel_tol: 1e-11, ..spec() },
    )
    .unwrap();
    assert!(rel(tensor.value, reduced) < 1e-8, "{} vs {reduced}", tensor.value);
}
