//! Weighted `L^p` norms of test functions through the radial reduction.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::cell::RefCell;

use super::{integrate, IntegralResult, QuadratureSpec};
use crate::corpus::TestFunction;
use crate::error::{Error, Result};
use crate::geometry::{radial_reduce, Setting};
use crate::jets::jet_of;

/// A nonnegative quantity `value · σ^{sigma_power}` where σ is the (unknown)
/// quasi-sphere measure of a homogeneous group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormValue {
    pub value: f64,
    pub sigma_power: f64,
    pub error_estimate: f64,
    pub converged: bool,
    pub panels: usize,
}

const SIGMA_MATCH: f64 = 1e-12;

impl NormValue {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            sigma_power: 0.0,
            error_estimate: 0.0,
            converged: true,
            panels: 0,
        }
    }

    /// The symbolic factor σ itself.
    pub fn sigma() -> Self {
        Self {
            sigma_power: 1.0,
            ..Self::exact(1.0)
        }
    }

    pub fn from_integral(r: IntegralResult<f64>) -> Self {
        Self {
            value: r.value,
            sigma_power: 0.0,
            error_estimate: r.error_estimate,
            converged: r.converged,
            panels: r.panels_used,
        }
    }

    pub fn mul(&self, o: &NormValue) -> NormValue {
        NormValue {
            value: self.value * o.value,
            sigma_power: self.sigma_power + o.sigma_power,
            error_estimate: self.value.abs() * o.error_estimate + o.value.abs() * self.error_estimate,
            converged: self.converged && o.converged,
            panels: self.panels + o.panels,
        }
    }

    pub fn scale(&self, c: f64) -> NormValue {
        NormValue {
            value: c * self.value,
            error_estimate: c.abs() * self.error_estimate,
            ..*self
        }
    }

    pub fn powf(&self, t: f64) -> NormValue {
        let value = self.value.powf(t);
        let error_estimate = if self.value > 0.0 {
            (t * value / self.value).abs() * self.error_estimate
        } else {
            self.error_estimate.powf(t.min(1.0))
        };
        NormValue {
            value,
            sigma_power: self.sigma_power * t,
            error_estimate,
            ..*self
        }
    }

    pub fn check_same_sigma(&self, o: &NormValue) -> Result<()> {
        if (self.sigma_power - o.sigma_power).abs() > SIGMA_MATCH {
            return Err(Error::ReductionNotApplicable(format!(
                "quasi-sphere factors do not cancel: σ^{} vs σ^{}",
                self.sigma_power, o.sigma_power
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &NormValue) -> Result<NormValue> {
        self.check_same_sigma(o)?;
        Ok(NormValue {
            value: self.value + o.value,
            sigma_power: self.sigma_power,
            error_estimate: self.error_estimate + o.error_estimate,
            converged: self.converged && o.converged,
            panels: self.panels + o.panels,
        })
    }

    pub fn sub(&self, o: &NormValue) -> Result<NormValue> {
        self.add(&o.scale(-1.0))
    }
}

/// Which image of `f` is measured, and against which power weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", content = "arg", rename_all = "kebab-case")]
pub enum WeightTag {
    /// `f / |x′|^{d/p}`
    Critical,
    /// `|x′|^c f`
    Power(f64),
    /// `(log|x′|)^k (Euler)^k f / |x′|^{d/p}`
    LogEuler(usize),
}

/// `∫_{lo}^{hi} F(r, T_0(r), …, T_order(r)) dr` over the radial support of `f`,
/// where `T_j = (log r)^j (r d/dr)^j g`. Zero when the support is empty.
pub fn radial_integral<F>(f: &TestFunction, order: usize, spec: &QuadratureSpec, integrand: F) -> Result<IntegralResult<f64>>
where
    F: Fn(f64, &[Complex64]) -> f64,
{
    let sup = f.radial.support();
    if sup.lo >= sup.hi || f.is_zero() {
        return Ok(IntegralResult::zero());
    }
    if !sup.is_compact_away_from_zero() {
        return Err(Error::Admissibility(format!(
            "{}: radial support [{}, {}] is not compact in (0, ∞)",
            f.label, sup.lo, sup.hi
        )));
    }
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let res = integrate(
        |r: f64| match jet_of(&f.radial, r, order) {
            Ok(jet) => integrand(r, &jet.logeuler_tower()),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        sup.lo,
        sup.hi,
        spec,
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(res)
}

/// `‖w·image‖_p^p` as a [`NormValue`].
pub fn weighted_lp_pow(f: &TestFunction, tag: WeightTag, p: f64, setting: &Setting, spec: &QuadratureSpec) -> Result<NormValue> {
    if !(p > 0.0) {
        return Err(Error::Domain(format!("norm exponent must be positive, got {p}")));
    }
    let red = radial_reduce(setting, f, p, spec)?;
    let d = red.dimension;
    let radial = match tag {
        WeightTag::Critical => radial_integral(f, 0, spec, |r, t| t[0].norm().powf(p) / r)?,
        WeightTag::Power(c) => radial_integral(f, 0, spec, |r, t| r.powf(d - 1.0 + c * p) * t[0].norm().powf(p))?,
        WeightTag::LogEuler(k) => radial_integral(f, k, spec, |r, t| t[k].norm().powf(p) / r)?,
    };
    Ok(NormValue::from_integral(radial).mul(&red.common))
}

/// `‖w·image‖_p`.
pub fn weighted_lp(f: &TestFunction, tag: WeightTag, p: f64, setting: &Setting, spec: &QuadratureSpec) -> Result<NormValue> {
    Ok(weighted_lp_pow(f, tag, p, setting, spec)?.powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::bump_profile;
    use std::f64::consts::PI;

    #[test]
    fn critical_norm_matches_hand_reduction() {
        let s = Setting::euclidean(2, 2).unwrap();
        let g = bump_profile(2.0, 0.5).unwrap();
        let f = TestFunction::radial_only("b", g.clone());
        let spec = QuadratureSpec::default();
        let n = weighted_lp(&f, WeightTag::Critical, 2.0, &s, &spec).unwrap();
        let hand = integrate(|r: f64| g.eval(r).unwrap().norm_sqr() / r, 1.5, 2.5, &spec).value;
        assert!((n.value - (2.0 * PI * hand).sqrt()).abs() < 1e-12 * n.value);
        assert_eq!(n.sigma_power, 0.0);
    }

    #[test]
    fn zero_function_has_zero_norm() {
        let s = Setting::euclidean(2, 2).unwrap();
        let n = weighted_lp(&TestFunction::zero(), WeightTag::LogEuler(1), 3.0, &s, &QuadratureSpec::default()).unwrap();
        assert_eq!(n.value, 0.0);
    }

    #[test]
    fn norm_is_homogeneous() {
        let s = Setting::euclidean(1, 1).unwrap();
        let f = TestFunction::radial_only("b", bump_profile(1.1, 0.4).unwrap());
        let spec = QuadratureSpec::default();
        let a = weighted_lp(&f, WeightTag::Power(0.3), 1.5, &s, &spec).unwrap().value;
        let b = weighted_lp(&f.scaled(Complex64::new(2.0, 0.0)), WeightTag::Power(0.3), 1.5, &s, &spec).unwrap().value;
        assert!((b - 2.0 * a).abs() < 1e-12 * b);
    }

    #[test]
    fn anisotropic_norm_carries_sigma() {
        let s = Setting::homogeneous(vec![1, 2]).unwrap();
        let f = TestFunction::radial_only("b", bump_profile(2.0, 0.5).unwrap());
        let n = weighted_lp(&f, WeightTag::Critical, 3.0, &s, &QuadratureSpec::default()).unwrap();
        assert!((n.sigma_power - 1.0 / 3.0).abs() < 1e-15);
        let m = NormValue::exact(1.0);
        assert!(n.add(&m).is_err());
    }
}
