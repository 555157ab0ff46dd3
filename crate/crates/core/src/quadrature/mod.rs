//! Adaptive Gauss–Kronrod quadrature (G10/K21) with global bisection, nested
//! tensor-product integration over boxes, and closed-form log-power tails.

pub mod weighted;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::cell::Cell;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

pub use weighted::{radial_integral, weighted_lp, weighted_lp_pow, NormValue, WeightTag};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Always used as panel boundaries when they fall inside the domain.
    pub split_points: Vec<f64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_subdivisions: 4000,
            split_points: vec![1.0],
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::Config("quadrature tolerances must be positive".into()));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::Config("max_subdivisions must be positive".into()));
        }
        Ok(())
    }

    fn target(&self, value: f64) -> f64 {
        (self.rel_tol * value).max(self.abs_tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult<T> {
    pub value: T,
    pub error_estimate: f64,
    pub panels_used: usize,
    pub converged: bool,
}

impl<T: QuadValue> IntegralResult<T> {
    pub fn zero() -> Self {
        Self {
            value: T::zero(),
            error_estimate: 0.0,
            panels_used: 0,
            converged: true,
        }
    }

    pub fn ok(self) -> Result<T> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(Error::NotConverged(format!(
                "error estimate {:e} after {} panels",
                self.error_estimate, self.panels_used
            )))
        }
    }
}

/// Values the rules can integrate.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
    fn is_finite_value(&self) -> bool;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy)]
struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

/// One K21 panel with the QUADPACK error heuristic. Returns `None` when the
/// integrand produced a non-finite value.
fn qk21<T: QuadValue, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> Option<Panel<T>> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    if !fc.is_finite_value() {
        return None;
    }
    let mut resg = T::zero();
    let mut resk = fc * WGK[10];
    let mut resabs = fc.magnitude() * WGK[10];
    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        if !f1.is_finite_value() || !f2.is_finite_value() {
            return None;
        }
        fv1[j] = f1;
        fv2[j] = f2;
        let s = f1 + f2;
        resk = resk + s * WGK[j];
        resabs += WGK[j] * (f1.magnitude() + f2.magnitude());
        if j % 2 == 1 {
            resg = resg + s * WG[j / 2];
        }
    }
    let mean = resk * 0.5;
    let mut resasc = WGK[10] * (fc - mean).magnitude();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).magnitude() + (fv2[j] - mean).magnitude());
    }
    let result = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut err = ((resk - resg) * half).magnitude();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    Some(Panel {
        a,
        b,
        value: result,
        error: err,
    })
}

/// Adaptive integration of `f` over `[a, b]`.
///
/// Panels are bisected globally (largest error first, ties to the left) and
/// summed left to right, so the result does not depend on evaluation order.
pub fn integrate<T: QuadValue, F: Fn(f64) -> T>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> IntegralResult<T> {
    integrate_with_splits(f, a, b, &spec.split_points, spec)
}

pub fn integrate_with_splits<T: QuadValue, F: Fn(f64) -> T>(
    f: F,
    a: f64,
    b: f64,
    extra_splits: &[f64],
    spec: &QuadratureSpec,
) -> IntegralResult<T> {
    if a == b {
        return IntegralResult::zero();
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut cuts: Vec<f64> = spec
        .split_points
        .iter()
        .chain(extra_splits)
        .copied()
        .filter(|&s| s > lo && s < hi)
        .collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).expect("finite split points"));
    cuts.dedup();
    let mut edges = vec![lo];
    edges.extend(cuts);
    edges.push(hi);

    let failed = |panels: usize| IntegralResult {
        value: T::zero(),
        error_estimate: f64::INFINITY,
        panels_used: panels,
        converged: false,
    };

    let mut panels: Vec<Panel<T>> = Vec::with_capacity(64);
    for w in edges.windows(2) {
        match qk21(&f, w[0], w[1]) {
            Some(p) => panels.push(p),
            None => return failed(panels.len() + 1),
        }
    }

    let mut converged = false;
    loop {
        let total: T = panels.iter().fold(T::zero(), |acc, p| acc + p.value);
        let err: f64 = panels.iter().map(|p| p.error).sum();
        if err <= spec.target(total.magnitude()) {
            converged = true;
            break;
        }
        if panels.len() >= spec.max_subdivisions {
            break;
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .fold((0usize, -1.0f64), |(bi, be), (i, p)| if p.error > be { (i, p.error) } else { (bi, be) });
        let p = panels[idx];
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a && mid < p.b) {
            break;
        }
        let (left, right) = match (qk21(&f, p.a, mid), qk21(&f, mid, p.b)) {
            (Some(l), Some(r)) => (l, r),
            _ => return failed(panels.len() + 2),
        };
        panels[idx] = left;
        panels.insert(idx + 1, right);
    }

    let value = panels.iter().fold(T::zero(), |acc, p| acc + p.value) * sign;
    IntegralResult {
        value,
        error_estimate: panels.iter().map(|p| p.error).sum(),
        panels_used: panels.len(),
        converged,
    }
}

/// One axis of a tensor-product box.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub splits: Vec<f64>,
}

impl Axis {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            splits: Vec::new(),
        }
    }

    pub fn with_splits(lo: f64, hi: f64, splits: Vec<f64>) -> Self {
        Self { lo, hi, splits }
    }
}

pub const MAX_BOX_DIMS: usize = 5;

/// Nested adaptive integration over a box of at most five dimensions.
///
/// The first axis is outermost. Inner integrals use the same tolerances; the
/// reported error adds the length-weighted mean inner error to the outer one.
/// Split points of `spec` apply only to the first axis.
pub fn integrate_box<T: QuadValue, F: Fn(&[f64]) -> T>(
    f: F,
    axes: &[Axis],
    spec: &QuadratureSpec,
) -> Result<IntegralResult<T>> {
    if axes.is_empty() || axes.len() > MAX_BOX_DIMS {
        return Err(Error::Capability(format!(
            "tensor quadrature supports 1 to {MAX_BOX_DIMS} dimensions, got {}",
            axes.len()
        )));
    }
    let point = vec![0.0; axes.len()];
    let inner_spec = QuadratureSpec {
        split_points: Vec::new(),
        ..spec.clone()
    };
    Ok(nested(&f, axes, 0, &point, spec, &inner_spec))
}

fn nested<T: QuadValue, F: Fn(&[f64]) -> T>(
    f: &F,
    axes: &[Axis],
    level: usize,
    point: &[f64],
    outer_spec: &QuadratureSpec,
    inner_spec: &QuadratureSpec,
) -> IntegralResult<T> {
    let spec = if level == 0 { outer_spec } else { inner_spec };
    let ax = &axes[level];
    if level + 1 == axes.len() {
        let base = point.to_vec();
        return integrate_with_splits(
            |x| {
                let mut p = base.clone();
                p[level] = x;
                f(&p)
            },
            ax.lo,
            ax.hi,
            &ax.splits,
            spec,
        );
    }
    let inner_err = Cell::new(0.0f64);
    let inner_calls = Cell::new(0usize);
    let inner_ok = Cell::new(true);
    let inner_panels = Cell::new(0usize);
    let base = point.to_vec();
    let outer = integrate_with_splits(
        |x| {
            let mut p = base.clone();
            p[level] = x;
            let r = nested(f, axes, level + 1, &p, outer_spec, inner_spec);
            inner_err.set(inner_err.get() + r.error_estimate);
            inner_calls.set(inner_calls.get() + 1);
            inner_panels.set(inner_panels.get() + r.panels_used);
            if !r.converged {
                inner_ok.set(false);
            }
            if r.converged {
                r.value
            } else {
                // poison the outer rule so non-convergence cannot be masked
                r.value * f64::NAN
            }
        },
        ax.lo,
        ax.hi,
        &ax.splits,
        spec,
    );
    let calls = inner_calls.get().max(1) as f64;
    let mean_inner = inner_err.get() / calls;
    IntegralResult {
        value: outer.value,
        error_estimate: outer.error_estimate + mean_inner * (ax.hi - ax.lo).abs(),
        panels_used: outer.panels_used + inner_panels.get(),
        converged: outer.converged && inner_ok.get(),
    }
}

/// `∫_{r0}^∞ (log r)^{pA} dr/r = (log r0)^{pA+1} / (−pA − 1)`.
pub fn log_tail_integral(p_a: f64, r0: f64) -> Result<f64> {
    if !(p_a < -1.0) {
        return Err(Error::Divergence(format!(
            "tail of (log r)^{p_a} dr/r diverges unless pA < -1"
        )));
    }
    if !(r0 > 1.0) {
        return Err(Error::Domain(format!("tail start must exceed 1, got {r0}")));
    }
    Ok(r0.ln().powf(p_a + 1.0) / (-p_a - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, PI};

    #[test]
    fn log_squared_over_r() {
        let r = integrate(|x: f64| x.ln().powi(2) / x, 1.0, E, &QuadratureSpec::default());
        assert!(r.converged);
        assert!((r.value - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn zero_integrand() {
        let r = integrate(|_x: f64| 0.0, 0.5, 3.0, &QuadratureSpec::default());
        assert!(r.converged);
        assert_eq!(r.value, 0.0);
        assert_eq!(r.error_estimate, 0.0);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let s = QuadratureSpec::default();
        let a = integrate(|x: f64| x.sin(), 0.0, 2.0, &s).value;
        let b = integrate(|x: f64| x.sin(), 2.0, 0.0, &s).value;
        assert_eq!(a, -b);
    }

    #[test]
    fn complex_integrand() {
        let r = integrate(
            |x: f64| Complex64::new(0.0, x).exp(),
            0.0,
            PI,
            &QuadratureSpec::default(),
        );
        assert!((r.value - Complex64::new(0.0, 2.0)).norm() < 1e-13);
    }

    #[test]
    fn split_at_one_is_honoured() {
        // kink at r = 1 is integrated exactly because 1 is a panel edge
        let spec = QuadratureSpec {
            max_subdivisions: 2,
            ..QuadratureSpec::default()
        };
        let r = integrate(|x: f64| (x - 1.0).abs(), 0.0, 3.0, &spec);
        assert!(r.converged);
        assert!((r.value - 2.5).abs() < 1e-14);
        assert_eq!(r.panels_used, 2);
    }

    #[test]
    fn non_finite_integrand_reports_divergence() {
        let r = integrate(|x: f64| 1.0 / (x - 0.5), 0.0, 1.0, &QuadratureSpec::default());
        assert!(!r.converged);
        assert!(r.ok().is_err());
    }

    #[test]
    fn subdivision_cap_reports_non_convergence() {
        let spec = QuadratureSpec {
            max_subdivisions: 3,
            ..QuadratureSpec::default()
        };
        let r = integrate(|x: f64| (40.0 * x).sin() / (x + 1e-3).sqrt(), 0.0, 10.0, &spec);
        assert!(!r.converged);
    }

    #[test]
    fn box_gaussian() {
        let axes = [Axis::new(-8.0, 8.0), Axis::new(-8.0, 8.0)];
        let r = integrate_box(|x: &[f64]| (-(x[0] * x[0] + x[1] * x[1])).exp(), &axes, &QuadratureSpec::default()).unwrap();
        assert!(r.converged);
        assert!((r.value - PI).abs() < 1e-11);
    }

    #[test]
    fn box_dimension_cap() {
        let axes = vec![Axis::new(0.0, 1.0); 6];
        assert!(matches!(
            integrate_box(|_x: &[f64]| 1.0, &axes, &QuadratureSpec::default()),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn log_tail_examples() {
        assert!((log_tail_integral(-2.0, E).unwrap() - 1.0).abs() < 1e-15);
        assert!((log_tail_integral(-1.1, E).unwrap() - 10.0).abs() < 1e-12);
        assert!(matches!(log_tail_integral(-1.0, E), Err(Error::Divergence(_))));
        assert!(matches!(log_tail_integral(-0.5, E), Err(Error::Divergence(_))));
    }

    #[test]
    fn tail_formula_matches_window_plus_tail() {
        let spec = QuadratureSpec::default();
        for (pa, r0, big_r) in [(-2.0, 1.5, 30.0), (-1.3, E, 100.0), (-3.5, 1.2, 5.0)] {
            let window = integrate(|r: f64| r.ln().powf(pa) / r, r0, big_r, &spec);
            let total = window.value + log_tail_integral(pa, big_r).unwrap();
            let closed = log_tail_integral(pa, r0).unwrap();
            assert!((total - closed).abs() <= 1e-9 * closed, "pa={pa}");
        }
    }
}
