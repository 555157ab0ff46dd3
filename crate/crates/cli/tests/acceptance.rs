//! Acceptance criteria, one line each. Runs without the libtest harness so the
//! lines are printed on success too; exits nonzero if any criterion fails.

use std::f64::consts::TAU;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cylhardy::combinatorics::{coeff_o, verify_recurrences};
use cylhardy::corpus::{build_corpus, CorpusOptions, TestFunction};
use cylhardy::geometry::Setting;
use cylhardy::jets::{bump_profile, check_operator_identities, log_power_profile, CutoffSpec, RadialProfile};
use cylhardy::quadrature::QuadratureSpec;
use cylhardy::report::{run_suite, SuiteConfig};
use cylhardy::verifiers::*;

type Outcome = Result<String, String>;

const SEED: u64 = 1;
const COUNT: usize = 20;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn corpus(s: &Setting, nonseparable: bool) -> Result<Vec<TestFunction>, String> {
    build_corpus(SEED, COUNT, s, CorpusOptions { complex: true, nonseparable }).map_err(|e| e.to_string())
}

fn euclidean() -> Vec<Setting> {
    [(1, 1), (2, 2), (3, 2), (3, 3)]
        .iter()
        .map(|&(n, big_n)| Setting::euclidean(n, big_n).unwrap())
        .collect()
}

fn c1_combinatorics() -> Outcome {
    let rep = verify_recurrences(12).map_err(|e| e.to_string())?;
    ensure(rep.all_pass(), || format!("{} recurrence failures", rep.failures().count()))?;
    let direct = coeff_o(3, 2).map_err(|e| e.to_string())?;
    let recurrence = BigUint::from(4u32 * 2 * 3) * coeff_o(2, 2).unwrap() + BigUint::from(4u32) * coeff_o(2, 1).unwrap();
    ensure(direct == BigUint::from(132u32) && recurrence == direct, || format!("O(3,2) = {direct}, recurrence {recurrence}"))?;
    Ok(format!("{} exact checks, O(3,2) = 132", rep.checks.len()))
}

fn c2_operators() -> Outcome {
    let c = Complex64::new;
    let families: Vec<(&str, RadialProfile, f64, f64)> = vec![
        ("bump", bump_profile(2.0, 0.5).unwrap(), 1.5, 2.5),
        ("bump across r=1", bump_profile(1.0, 0.4).unwrap(), 0.6, 1.4),
        ("log power", log_power_profile(-0.55, CutoffSpec::new(0.1).unwrap(), None), 1.25, 6.0),
        ("polynomial", RadialProfile::Polynomial { coeffs: vec![c(1.0, 0.5), c(-2.0, 0.0), c(0.3, -1.0)] }, 0.2, 3.0),
        ("log polynomial", RadialProfile::LogPolynomial { coeffs: vec![c(1.0, 0.0), c(0.5, 0.2), c(0.0, 0.3), c(0.1, 0.0)] }, 0.3, 5.0),
        ("phase", RadialProfile::Phase { linear: 1.3, quadratic: -0.4 }, 0.2, 3.0),
    ];
    let mut worst: f64 = 0.0;
    for (name, g, lo, hi) in &families {
        let radii: Vec<f64> = (0..50).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / 50.0).collect();
        let rep = check_operator_identities(g, 6, &radii).map_err(|e| format!("{name}: {e}"))?;
        ensure(rep.max_residual() <= 1e-9, || format!("{name}: residual {:.3e}", rep.max_residual()))?;
        worst = worst.max(rep.max_residual());
    }
    Ok(format!("{} families, max residual {worst:.2e}", families.len()))
}

fn c3_identity() -> Outcome {
    let (mut worst, mut n, mut straddle, mut complex) = (0.0f64, 0, 0, 0);
    for s in euclidean() {
        let fs = corpus(&s, true)?;
        straddle += fs.iter().filter(|f| f.support().contains(1.0)).count();
        complex += fs.iter().filter(|f| f.is_complex()).count();
        for f in &fs {
            for p in [1.5, 2.0, 3.0] {
                let r = verify_identity(f, p, &s, &spec()).map_err(|e| e.to_string())?;
                let rem = r.remainder.unwrap_or(0.0);
                ensure(r.passed() && r.residual <= 1e-7 && rem >= -1e-9, || format!("{s} {} p={p}: {r:?}", f.label))?;
                worst = worst.max(r.residual);
                n += 1;
            }
        }
    }
    ensure(straddle > 0 && complex > 0, || "corpus lacks straddling or complex members".into())?;
    Ok(format!("{n} records, worst residual {worst:.2e}, {straddle} straddle r=1"))
}

fn c4_triangle() -> Outcome {
    let mut worst: f64 = 0.0;
    for s in euclidean() {
        for f in &corpus(&s, true)? {
            let r = consistency_triangle(f, &s, &spec()).map_err(|e| e.to_string())?;
            ensure(r.residual <= 1e-8, || format!("{s} {}: {:.3e}", f.label, r.residual))?;
            worst = worst.max(r.residual);
        }
    }
    Ok(format!("worst residual {worst:.2e}"))
}

fn c5_higher() -> Outcome {
    let (mut worst, mut n) = (0.0f64, 0);
    for s in euclidean() {
        for f in &corpus(&s, false)? {
            for k in 1..=3 {
                let t = higher_order_terms(f, k, &s, &spec()).map_err(|e| e.to_string())?;
                ensure(t.weighted_terms.iter().all(|w| w.value >= 0.0), || format!("negative term k={k}"))?;
                let r = verify_higher_order_identity(f, k, &s, &spec()).map_err(|e| e.to_string())?;
                ensure(r.passed() && r.residual <= 1e-6, || format!("{s} {} k={k}: {r:?}", f.label))?;
                worst = worst.max(r.residual);
                n += 1;
            }
        }
    }
    Ok(format!("{n} records, worst residual {worst:.2e}"))
}

fn c6_heisenberg() -> Outcome {
    let s = Setting::StratifiedH1;
    let fs = corpus(&s, true)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut collapse: f64 = 0.0;
    for i in 0..1000 {
        let f = &fs[i % fs.len()];
        let sup = f.support();
        let r = rng.random_range(sup.lo..sup.hi);
        let th = rng.random_range(0.0..TAU);
        let t = rng.random_range(-3.0..3.0);
        let res = heisenberg_collapse_residual(f, &[r * th.cos(), r * th.sin(), t]).map_err(|e| e.to_string())?;
        collapse = collapse.max(res);
    }
    ensure(collapse <= 1e-14, || format!("collapse residual {collapse:.3e}"))?;
    let mut worst: f64 = 0.0;
    for f in &fs {
        for p in [1.5, 2.0, 3.0] {
            let r = verify_identity(f, p, &s, &spec()).map_err(|e| e.to_string())?;
            ensure(r.passed() && r.residual <= 1e-6, || format!("{} p={p}: {r:?}", f.label))?;
            worst = worst.max(r.residual);
        }
    }
    let spot = heisenberg_spot_check(&fs[1], 2.0, &spec()).map_err(|e| e.to_string())?;
    ensure(spot.converged && spot.max_disagreement <= 1e-6, || format!("tensor spot check {spot:?}"))?;
    Ok(format!(
        "collapse {collapse:.1e}, worst residual {worst:.2e}, tensor agreement {:.1e}",
        spot.max_disagreement
    ))
}

fn c7_homogeneous() -> Outcome {
    let s = Setting::homogeneous(vec![1, 2]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut hom: f64 = 0.0;
    for _ in 0..1000 {
        let x = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
        let lam: f64 = rng.random_range(0.05..20.0);
        let a = s.quasi_norm(&s.dilate(lam, &x));
        let b = lam * s.quasi_norm(&x);
        hom = hom.max((a - b).abs() / b);
    }
    ensure(hom <= 1e-12, || format!("quasi-norm homogeneity {hom:.3e}"))?;
    let probe = [s.quasi_norm(&[1.0, 0.0]), s.quasi_norm(&[0.0, 4.0])];
    ensure(probe == [1.0, 2.0], || format!("quasi-norm probes {probe:?}"))?;
    let mut worst: f64 = 0.0;
    for f in &corpus(&s, true)? {
        for p in [2.0, 3.0] {
            let r = verify_identity(f, p, &s, &spec()).map_err(|e| e.to_string())?;
            ensure(r.passed() && r.residual <= 1e-7, || format!("{} p={p}: {r:?}", f.label))?;
            worst = worst.max(r.residual);
        }
    }
    let iso = Setting::homogeneous(vec![1, 1]).unwrap();
    let plane = Setting::euclidean(2, 2).unwrap();
    let mut matched: f64 = 0.0;
    for f in corpus(&iso, true)? {
        let f = TestFunction { angular: None, ..f };
        for p in [1.5, 2.0, 3.0] {
            let a = identity_terms(&f, p, &iso, &spec()).map_err(|e| e.to_string())?;
            let b = identity_terms(&f, p, &plane, &spec()).map_err(|e| e.to_string())?;
            for (x, y) in [(a.lhs, b.lhs), (a.main, b.main), (a.remainder, b.remainder)] {
                matched = matched.max((x.value - y.value).abs() / x.value.abs().max(y.value.abs()).max(1e-300));
            }
        }
    }
    ensure(matched <= 1e-8, || format!("isotropic vs Euclidean {matched:.3e}"))?;
    Ok(format!("homogeneity {hom:.1e}, worst residual {worst:.2e}, isotropic match {matched:.1e}"))
}

fn c8_inequalities() -> Outcome {
    let config = SuiteConfig::named("inequalities").map_err(|e| e.to_string())?;
    let required = [
        "sob-3.1", "hardy-3.6", "badiale-3.8", "stability-3.9", "higher-ineq-4.5", "ckn-5.1", "higher-ckn", "uncert-5.4",
        "hpw-5.5", "nash-5.7", "ckn-strat-5.6", "uncert-strat-5.12", "ckn-hom-5.9", "uncert-hom-5.17",
    ];
    let report = run_suite(&config).map_err(|e| e.to_string())?;
    for id in required {
        ensure(report.records.iter().any(|r| r.statement == id), || format!("no records for {id}"))?;
    }
    let mut min_slack = f64::INFINITY;
    for r in &report.records {
        ensure(r.passed(), || format!("{} {} {}: {r:?}", r.statement, r.setting, r.function))?;
        if r.kind == RecordKind::Inequality {
            ensure(r.slack() >= -1e-9, || format!("{} slack {}", r.statement, r.slack()))?;
            min_slack = min_slack.min(r.slack());
        }
    }
    Ok(format!("{} records, min absolute slack {min_slack:.2e}", report.records.len()))
}

fn c9_ckn_edges() -> Outcome {
    let (mut w0, mut w1, mut wh) = (0.0f64, 0.0f64, 0.0f64);
    for s in euclidean() {
        let d = s.dimension_parameter();
        let trivial = ExponentTuple::from_free(2.0, 3.0, 0.0, 0.2, d).map_err(|e| e.to_string())?;
        let full = ExponentTuple::from_free(3.0, 2.0, 1.0, 0.2, d).map_err(|e| e.to_string())?;
        let holder = ExponentTuple::from_free(2.0, 2.0, 0.5, -d / 2.0, d).map_err(|e| e.to_string())?;
        ensure(holder.is_holder_equality(), || "Hölder tuple not classified".into())?;
        for f in &corpus(&s, true)? {
            let r0 = verify_ckn(f, &trivial, &s, &spec()).map_err(|e| e.to_string())?;
            let r1 = verify_ckn(f, &full, &s, &spec()).map_err(|e| e.to_string())?;
            let rh = verify_ckn(f, &holder, &s, &spec()).map_err(|e| e.to_string())?;
            ensure(r0.passed() && r0.residual <= 1e-12, || format!("δ=0 {s} {}: {:.3e}", f.label, r0.residual))?;
            ensure(r1.passed() && r1.residual <= 1e-7, || format!("δ=1 {s} {}: {:.3e}", f.label, r1.residual))?;
            ensure(rh.passed() && rh.residual <= 1e-7, || format!("Hölder {s} {}: {:.3e}", f.label, rh.residual))?;
            // the whole gap of the remainder-free bound is the remainder's share
            let gap = rh.params["gap_without_remainder"];
            let share = rh.params["remainder_share"];
            ensure((gap - share).abs() <= 1e-7 * rh.lhs.max(1e-300), || format!("Hölder gap {gap} vs share {share}"))?;
            (w0, w1, wh) = (w0.max(r0.residual), w1.max(r1.residual), wh.max(rh.residual));
        }
    }
    Ok(format!("δ=0 {w0:.1e}, δ=1 {w1:.1e}, Hölder {wh:.1e}"))
}

fn c10_sweeps() -> Outcome {
    let eps = [1e-1, 1e-2, 1e-3, 1e-4];
    let r = sharpness_sweep(SweepStatement::CriticalSobolev { p: 2.0 }, 0.1, &eps, 0.01, &spec()).map_err(|e| e.to_string())?;
    let ratios: Vec<f64> = r.rows.iter().map(|x| x.ratio).collect();
    ensure(ratios.iter().all(|&x| x >= 1.0 - 1e-9), || format!("ratio below 1: {ratios:?}"))?;
    ensure(ratios.windows(2).all(|w| w[1] < w[0]), || format!("not decreasing: {ratios:?}"))?;
    ensure(ratios[3] <= 1.01, || format!("R(1e-4) = {}", ratios[3]))?;
    let mut q_err: f64 = 0.0;
    for (p, a) in [(2.0, -0.7), (2.0, -0.51), (3.0, -0.4), (1.5, -1.0)] {
        let (got, closed) = log_power_quotient(p, a, 2.0, 10.0, &spec()).map_err(|e| e.to_string())?;
        q_err = q_err.max((got - closed).abs() / closed);
    }
    ensure(q_err <= 1e-9, || format!("log-power quotient error {q_err:.3e}"))?;
    let config = SuiteConfig::default();
    let h = sharpness_sweep(
        SweepStatement::HigherOrder { k: 2 },
        config.sweep.delta,
        &config.sweep.higher_epsilons,
        0.02,
        &spec(),
    )
    .map_err(|e| e.to_string())?;
    let last = h.rows.last().unwrap();
    ensure(h.passed() && last.ratio <= 1.02, || format!("k=2 sweep {h:?}"))?;
    Ok(format!(
        "R = {ratios:.5?}, quotient error {q_err:.1e}, k=2 R({:e}) = {:.5}",
        last.epsilon, last.ratio
    ))
}

fn c11_cp() -> Outcome {
    let mut parts = Vec::new();
    for p in [1.5, 2.0, 3.0, 4.0] {
        let r = cp_sample(SEED, 100_000, p).map_err(|e| e.to_string())?;
        ensure(r.min_value >= -1e-12, || format!("p={p}: min C_p {}", r.min_value))?;
        ensure(r.max_homogeneity_residual <= 1e-12, || format!("p={p}: homogeneity {}", r.max_homogeneity_residual))?;
        if p == 2.0 {
            ensure(r.max_c2_deviation <= 4.0 * f64::EPSILON, || format!("C_2 deviation {}", r.max_c2_deviation))?;
        }
        parts.push(format!("p={p} min {:.1e}", r.min_value));
    }
    Ok(parts.join(", "))
}

fn run_cli(args: &[&str], threads: &str) -> Result<(i32, String), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_cylhardy"))
        .args(args)
        .env("CYLHARDY_THREADS", threads)
        .output()
        .map_err(|e| e.to_string())?;
    Ok((out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stderr).into_owned()))
}

fn without_timestamp(path: &std::path::Path) -> Result<String, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    Ok(text.lines().filter(|l| !l.trim_start().starts_with("\"timestamp\"")).collect::<Vec<_>>().join("\n"))
}

fn c12_reproducibility() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dir = |name: &str| tmp.path().join(name).display().to_string();
    let base = ["run", "--suite", "quick", "--seed", "7", "--format", "json"];
    let (a, b) = (dir("a"), dir("b"));
    let (code_a, err_a) = run_cli(&[&base[..], &["--out", &a]].concat(), "1")?;
    let (code_b, _) = run_cli(&[&base[..], &["--out", &b]].concat(), "3")?;
    ensure(code_a == 0 && code_b == 0, || format!("exit codes {code_a}, {code_b}: {err_a}"))?;
    let ja = without_timestamp(&tmp.path().join("a/report.json"))?;
    let jb = without_timestamp(&tmp.path().join("b/report.json"))?;
    ensure(ja == jb, || "reports differ outside the timestamp".into())?;

    let cfg = tmp.path().join("starved.toml");
    std::fs::write(&cfg, "statements = [\"id-3.2\"]\n[quadrature]\nmax_subdivisions = 1\n").map_err(|e| e.to_string())?;
    let c = dir("c");
    let (code_c, _) = run_cli(&["run", "--config", &cfg.display().to_string(), "--count", "2", "--out", &c], "1")?;
    ensure(code_c != 0, || "failing run exited with status 0".into())?;
    let (code_d, _) = run_cli(&["run", "--suite", "no-such-suite", "--out", &dir("d")], "1")?;
    ensure(code_d != 0, || "unknown suite exited with status 0".into())?;
    Ok(format!("{} identical bytes, failing run exit {code_c}", ja.len()))
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() -> ExitCode {
    let s = Duration::from_secs;
    let criteria: [Criterion; 12] = [
        ("combinatorics exactness", Duration::from_millis(1000), c1_combinatorics),
        ("operator calculus", s(5), c2_operators),
        ("first-order identity", s(60), c3_identity),
        ("p=2 consistency triangle", s(60), c4_triangle),
        ("higher-order identity", s(60), c5_higher),
        ("stratified H1", s(120), c6_heisenberg),
        ("homogeneous group", s(120), c7_homogeneous),
        ("inequality suite", s(120), c8_inequalities),
        ("CKN edge cases", s(120), c9_ckn_edges),
        ("sharpness sweeps", s(30), c10_sweeps),
        ("C_p sampling", s(60), c11_cp),
        ("reproducibility", s(120), c12_reproducibility),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let (verdict, detail) = match outcome {
            Ok(d) if took <= *budget => ("PASS", d),
            Ok(d) => ("FAIL", format!("over budget {budget:?}: {d}")),
            Err(e) => ("FAIL", e),
        };
        if verdict == "FAIL" {
            failed += 1;
        }
        println!("criterion {:>2} {verdict} {name} [{:.2}s] {detail}", i + 1, took.as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
