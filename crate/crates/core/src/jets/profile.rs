//! Radial profiles with closed-form derivative towers.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::taylor::Series;
use super::RadialJet;
use crate::error::{Error, Result};

/// Highest derivative order offered by the compactly supported families.
pub const COMPACT_MAX_ORDER: usize = 10;
/// Highest derivative order offered by the entire (analytic) families.
pub const ANALYTIC_MAX_ORDER: usize = 24;

/// Smooth step `ψ_δ`: zero on `(0, 1+δ]`, one on `[1+2δ, ∞)`.
///
/// Built from `S(t) = e(t) / (e(t) + e(1−t))` with `e(t) = exp(−1/t)` for
/// `t > 0`, evaluated at `t = (r − 1 − δ)/δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffSpec {
    pub delta: f64,
}

impl CutoffSpec {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::Domain(format!("cutoff width must be positive, got {delta}")));
        }
        Ok(Self { delta })
    }

    pub fn band(&self) -> (f64, f64) {
        (1.0 + self.delta, 1.0 + 2.0 * self.delta)
    }

    pub fn series(&self, r: f64, len: usize) -> Series {
        let x = Series::variable(r, len);
        let t = x.add_scalar(Complex64::new(-1.0 - self.delta, 0.0)).scale_re(1.0 / self.delta);
        smooth_step(&t)
    }
}

/// Multiples of `δ^{−k}` bounding `|ψ_δ^{(k)}|`, i.e. `max_t |S^{(k)}(t)|`.
/// Frozen from a dense sample of the transition band (see the cutoff tests).
pub const CUTOFF_DERIVATIVE_BOUNDS: [f64; 9] = [
    1.0,
    2.0,
    9.85,
    111.0,
    2_290.0,
    77_300.0,
    4_830_000.0,
    428_500_000.0,
    48_500_000_000.0,
];

/// `S(t)` applied to a series; exact 0/1 outside the open unit interval.
pub(crate) fn smooth_step(t: &Series) -> Series {
    let n = t.len();
    let t0 = t.value().re;
    if t0 <= 0.0 {
        return Series::zero(n);
    }
    if t0 >= 1.0 {
        return Series::real_constant(1.0, n);
    }
    let one = Complex64::new(1.0, 0.0);
    // s = 1/t − 1/(1−t); S = 1/(1 + e^s) = e^{−s}/(1 + e^{−s})
    let inv_t = t.recip();
    let inv_1mt = (-t).add_scalar(one).recip();
    let s = &inv_t - &inv_1mt;
    if s.value().re >= 0.0 {
        let e = (-&s).exp();
        let denom = e.add_scalar(one).recip();
        &e * &denom
    } else {
        s.exp().add_scalar(one).recip()
    }
}

/// Radial profile families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RadialProfile {
    /// `exp(1 − 1/(1 − t²))`, `t = (r − center)/half_width`; peak value 1.
    Bump { center: f64, half_width: f64 },
    /// `ψ_δ(r)·χ_R(r)·(log r)^A` with optional cutoff and truncation.
    /// `χ_R` equals 1 on `(0, R]` and 0 on `[2R, ∞)`.
    LogPower {
        exponent: f64,
        cutoff: Option<CutoffSpec>,
        truncation: Option<f64>,
    },
    /// `Σ c_j r^j`.
    Polynomial { coeffs: Vec<Complex64> },
    /// `Σ c_j (log r)^j`.
    LogPolynomial { coeffs: Vec<Complex64> },
    /// `exp(i(α r + β r²))`.
    Phase { linear: f64, quadratic: f64 },
    Product { factors: Vec<RadialProfile> },
}

/// Interval `[lo, hi]` outside which a profile vanishes; `hi` may be infinite
/// and `lo = 0` means the profile reaches the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Support {
    pub lo: f64,
    pub hi: f64,
}

impl Support {
    pub fn everywhere() -> Self {
        Self { lo: 0.0, hi: f64::INFINITY }
    }

    pub fn is_compact_away_from_zero(&self) -> bool {
        self.lo > 0.0 && self.hi.is_finite() && self.hi > self.lo
    }

    pub fn contains(&self, r: f64) -> bool {
        r > self.lo && r < self.hi
    }
}

/// Smooth bump supported exactly on `[center − half_width, center + half_width]`.
pub fn bump_profile(center: f64, half_width: f64) -> Result<RadialProfile> {
    if !(half_width > 0.0) || !center.is_finite() {
        return Err(Error::Domain("bump half width must be positive".into()));
    }
    if center - half_width <= 0.0 {
        return Err(Error::Domain(format!(
            "bump support [{}, {}] touches the origin",
            center - half_width,
            center + half_width
        )));
    }
    Ok(RadialProfile::Bump { center, half_width })
}

/// `ψ_δ(r)(log r)^A`, optionally truncated smoothly between `R` and `2R`.
pub fn log_power_profile(exponent: f64, cutoff: CutoffSpec, truncation: Option<f64>) -> RadialProfile {
    RadialProfile::LogPower {
        exponent,
        cutoff: Some(cutoff),
        truncation,
    }
}

impl RadialProfile {
    pub fn constant(c: Complex64) -> Self {
        RadialProfile::Polynomial { coeffs: vec![c] }
    }

    pub fn max_jet_order(&self) -> usize {
        match self {
            RadialProfile::Bump { .. } => COMPACT_MAX_ORDER,
            RadialProfile::LogPower { cutoff, truncation, .. } => {
                if cutoff.is_some() || truncation.is_some() {
                    COMPACT_MAX_ORDER
                } else {
                    ANALYTIC_MAX_ORDER
                }
            }
            RadialProfile::Polynomial { .. }
            | RadialProfile::LogPolynomial { .. }
            | RadialProfile::Phase { .. } => ANALYTIC_MAX_ORDER,
            RadialProfile::Product { factors } => factors
                .iter()
                .map(|f| f.max_jet_order())
                .min()
                .unwrap_or(ANALYTIC_MAX_ORDER),
        }
    }

    pub fn support(&self) -> Support {
        match self {
            RadialProfile::Bump { center, half_width } => Support {
                lo: center - half_width,
                hi: center + half_width,
            },
            RadialProfile::LogPower {
                exponent,
                cutoff,
                truncation,
            } => {
                let lo = match cutoff {
                    Some(c) => c.band().0,
                    None if exponent.fract() != 0.0 => 1.0,
                    None => 0.0,
                };
                let hi = truncation.map_or(f64::INFINITY, |r| 2.0 * r);
                Support { lo, hi }
            }
            RadialProfile::Polynomial { coeffs } | RadialProfile::LogPolynomial { coeffs } => {
                if coeffs.iter().all(|c| *c == Complex64::new(0.0, 0.0)) {
                    Support { lo: 1.0, hi: 1.0 }
                } else {
                    Support::everywhere()
                }
            }
            RadialProfile::Phase { .. } => Support::everywhere(),
            RadialProfile::Product { factors } => {
                factors.iter().fold(Support::everywhere(), |acc, f| {
                    let s = f.support();
                    Support {
                        lo: acc.lo.max(s.lo),
                        hi: acc.hi.min(s.hi),
                    }
                })
            }
        }
    }

    /// True when some factor carries a genuinely complex value.
    pub fn is_complex(&self) -> bool {
        match self {
            RadialProfile::Phase { linear, quadratic } => *linear != 0.0 || *quadratic != 0.0,
            RadialProfile::Polynomial { coeffs } | RadialProfile::LogPolynomial { coeffs } => {
                coeffs.iter().any(|c| c.im != 0.0)
            }
            RadialProfile::Product { factors } => factors.iter().any(|f| f.is_complex()),
            _ => false,
        }
    }

    /// Taylor series of the profile at `r` with `len` coefficients.
    pub fn series(&self, r: f64, len: usize) -> Result<Series> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!("radius must be positive and finite, got {r}")));
        }
        let x = Series::variable(r, len);
        match self {
            RadialProfile::Bump { center, half_width } => {
                let t = x.add_scalar(Complex64::new(-center, 0.0)).scale_re(1.0 / half_width);
                if t.value().re.abs() >= 1.0 {
                    return Ok(Series::zero(len));
                }
                let one = Complex64::new(1.0, 0.0);
                let q = (&t * &t).scale_re(-1.0).add_scalar(one);
                Ok((-&q.recip()).add_scalar(one).exp())
            }
            RadialProfile::LogPower {
                exponent,
                cutoff,
                truncation,
            } => {
                let mut factor = Series::real_constant(1.0, len);
                if let Some(c) = cutoff {
                    let psi = c.series(r, len);
                    if psi.c.iter().all(|v| v.norm() == 0.0) {
                        return Ok(Series::zero(len));
                    }
                    factor = &factor * &psi;
                }
                if let Some(big_r) = truncation {
                    let t = x.scale_re(-1.0 / big_r).add_scalar(Complex64::new(2.0, 0.0));
                    let chi = smooth_step(&t);
                    if chi.c.iter().all(|v| v.norm() == 0.0) {
                        return Ok(Series::zero(len));
                    }
                    factor = &factor * &chi;
                }
                let l = x.ln();
                let a = *exponent;
                let lp = if a.fract() == 0.0 && a.abs() < 64.0 {
                    if a < 0.0 && l.value().re == 0.0 {
                        return Err(Error::Domain("log power with negative exponent at r = 1".into()));
                    }
                    l.powi(a as i32)
                } else if l.value().re > 0.0 {
                    l.powf(a)
                } else {
                    return Err(Error::Domain(format!(
                        "(log r)^{a} needs r > 1 for non-integer exponent, got r = {r}"
                    )));
                };
                Ok(&factor * &lp)
            }
            RadialProfile::Polynomial { coeffs } => Ok(x.polynomial(coeffs)),
            RadialProfile::LogPolynomial { coeffs } => Ok(x.ln().polynomial(coeffs)),
            RadialProfile::Phase { linear, quadratic } => {
                let theta = x.polynomial(&[
                    Complex64::new(0.0, 0.0),
                    Complex64::new(*linear, 0.0),
                    Complex64::new(*quadratic, 0.0),
                ]);
                Ok(theta.scale(Complex64::new(0.0, 1.0)).exp())
            }
            RadialProfile::Product { factors } => {
                let mut acc = Series::real_constant(1.0, len);
                for f in factors {
                    let s = f.series(r, len)?;
                    if s.c.iter().all(|v| v.norm() == 0.0) {
                        return Ok(Series::zero(len));
                    }
                    acc = &acc * &s;
                }
                Ok(acc)
            }
        }
    }

    pub fn eval(&self, r: f64) -> Result<Complex64> {
        Ok(self.series(r, 1)?.value())
    }
}

/// Jet `(g, g′, …, g^{(K)})` of a profile at `r`.
pub fn jet_of(profile: &RadialProfile, r: f64, order: usize) -> Result<RadialJet> {
    let max = profile.max_jet_order();
    if order > max {
        return Err(Error::Capability(format!(
            "jet order {order} exceeds the profile's maximum {max}"
        )));
    }
    let s = profile.series(r, order + 1)?;
    Ok(RadialJet {
        r,
        derivs: s.derivatives(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn log_power_jet_at_e() {
        let p = RadialProfile::LogPower {
            exponent: 2.0,
            cutoff: None,
            truncation: None,
        };
        let j = jet_of(&p, E, 1).unwrap();
        assert!((j.derivs[0] - c(1.0)).norm() < 1e-15);
        assert!((j.derivs[1] - c(2.0 / E)).norm() < 1e-15);
    }

    #[test]
    fn log_power_value_at_e_squared() {
        let p = RadialProfile::LogPower {
            exponent: -0.5,
            cutoff: None,
            truncation: None,
        };
        let j = jet_of(&p, E * E, 0).unwrap();
        assert!((j.derivs[0].re - 2f64.powf(-0.5)).abs() < 1e-15);
        assert!(jet_of(&p, 0.5, 0).is_err());
        assert!(matches!(jet_of(&p, -1.0, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn bump_peak_and_outside() {
        let b = bump_profile(2.0, 0.5).unwrap();
        assert!((b.eval(2.0).unwrap() - c(1.0)).norm() < 1e-15);
        assert_eq!(b.eval(1.49).unwrap(), c(0.0));
        for r in [1.5, 2.5] {
            let j = jet_of(&b, r, 10).unwrap();
            assert!(j.derivs.iter().all(|d| d.norm() == 0.0));
        }
        assert!(bump_profile(0.5, 0.5).is_err());
        assert!(matches!(jet_of(&b, 2.0, 11), Err(Error::Capability(_))));
    }

    #[test]
    fn cutoff_log_power_values() {
        let cut = CutoffSpec::new(0.1).unwrap();
        let p = log_power_profile(-0.55, cut, None);
        assert!((p.eval(E).unwrap() - c(1.0)).norm() < 1e-15);
        assert_eq!(p.eval(1.05).unwrap(), c(0.0));
        // r d/dr (log r)^A = A (log r)^{A-1} where ψ = 1
        let j = jet_of(&p, E * E, 1).unwrap();
        let euler = j.derivs[1] * (E * E);
        assert!((euler.re - (-0.55 * 2f64.powf(-1.55))).abs() < 1e-14);
    }

    #[test]
    fn cutoff_shape() {
        let cut = CutoffSpec::new(0.2).unwrap();
        let (a, b) = cut.band();
        assert_eq!(cut.series(a - 1e-9, 1).value(), c(0.0));
        assert_eq!(cut.series(b + 1e-9, 1).value(), c(1.0));
        let mut prev = 0.0;
        for i in 1..200 {
            let r = a + (b - a) * i as f64 / 200.0;
            let v = cut.series(r, 1).value().re;
            assert!((0.0..=1.0).contains(&v));
            assert!(v >= prev);
            prev = v;
        }
        let mid = cut.series(0.5 * (a + b), 1).value().re;
        assert!((mid - 0.5).abs() < 1e-12);
    }

    #[test]
    fn cutoff_derivative_bounds_hold() {
        for delta in [0.05, 0.1, 0.5] {
            let cut = CutoffSpec::new(delta).unwrap();
            let (a, b) = cut.band();
            for i in 1..4000 {
                let r = a + (b - a) * i as f64 / 4000.0;
                let d = jet_of(
                    &RadialProfile::LogPower {
                        exponent: 0.0,
                        cutoff: Some(cut),
                        truncation: None,
                    },
                    r,
                    8,
                )
                .unwrap();
                for (k, v) in d.derivs.iter().enumerate() {
                    let bound = CUTOFF_DERIVATIVE_BOUNDS[k] / delta.powi(k as i32);
                    assert!(v.norm() <= bound * (1.0 + 1e-9), "k={k} r={r} |d|={} bound={bound}", v.norm());
                }
            }
        }
    }

    #[test]
    fn truncation_vanishes_beyond_twice_r() {
        let p = RadialProfile::LogPower {
            exponent: -1.0,
            cutoff: Some(CutoffSpec::new(0.1).unwrap()),
            truncation: Some(10.0),
        };
        assert_eq!(p.eval(20.5).unwrap(), c(0.0));
        assert!((p.eval(5.0).unwrap().re - 1.0 / 5f64.ln()).abs() < 1e-15);
        assert!(p.support().is_compact_away_from_zero());
    }

    #[test]
    fn product_support_is_intersection() {
        let p = RadialProfile::Product {
            factors: vec![
                bump_profile(2.0, 1.0).unwrap(),
                RadialProfile::Phase {
                    linear: 1.0,
                    quadratic: 0.0,
                },
            ],
        };
        let s = p.support();
        assert_eq!((s.lo, s.hi), (1.0, 3.0));
        assert!(p.is_complex());
    }
}
