//! Checks of the radial reduction against Cartesian evaluation: the H¹
//! collapse, a 3-D tensor spot check of the stratified identity and a 2-D
//! Cartesian evaluation on homogeneous groups.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::cell::{Cell, RefCell};
use std::f64::consts::PI;

use crate::corpus::TestFunction;
use crate::error::{Error, Result};
use crate::geometry::{HorizontalFrame, Setting};
use crate::jets::jet_of;
use crate::quadrature::{integrate_box, integrate_with_splits, Axis, IntegralResult, QuadratureSpec};

use super::cp::cp_functional;
use super::identity::{check_p, identity_terms};

/// Relative defect of `xXf + yYf = x f_x + y f_y` at a point of H¹. The
/// scale includes `|xy f_t|`, the size of the two `t`-terms that cancel.
pub fn heisenberg_collapse_residual(f: &TestFunction, point: &[f64]) -> Result<f64> {
    let pv = f.eval_cartesian(&Setting::StratifiedH1, point)?;
    let (xf, yf) = HorizontalFrame::apply(point, &pv.grad);
    let (x, y) = (point[0], point[1]);
    let lhs = xf * x + yf * y;
    let plain = pv.grad[0] * x + pv.grad[1] * y;
    let scale = (pv.grad[0] * x).norm() + (pv.grad[1] * y).norm() + (pv.grad[2] * (x * y)).norm();
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok((lhs - plain).norm() / scale)
}

/// The three identity terms by two independent routes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpotCheck {
    pub p: f64,
    /// `[lhs, main, remainder]` by Cartesian evaluation.
    pub cartesian: [f64; 3],
    /// The same terms through the radial reduction.
    pub reduced: [f64; 3],
    /// `|lhs − (main − remainder)| / scale` on the Cartesian side.
    pub identity_residual: f64,
    /// Largest `|cartesian_i − factor·reduced_i| / scale`.
    pub max_disagreement: f64,
    /// `cartesian / reduced` per term; the quasi-sphere measure on anisotropic
    /// groups and 1 elsewhere.
    pub factor: [f64; 3],
    pub converged: bool,
}

fn summarize(p: f64, cart: [IntegralResult<f64>; 3], reduced: [f64; 3], sigma_unknown: bool) -> SpotCheck {
    let c = [cart[0].value, cart[1].value, cart[2].value];
    let scale = c.iter().chain(reduced.iter()).map(|v| v.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let factor = [0, 1, 2].map(|i| if reduced[i] != 0.0 { c[i] / reduced[i] } else { 1.0 });
    // with σ unknown, compare the terms after scaling by the lhs estimate
    let s = if sigma_unknown { factor[0] } else { 1.0 };
    let max_disagreement = (0..3).map(|i| (c[i] - s * reduced[i]).abs() / scale).fold(0.0, f64::max);
    SpotCheck {
        p,
        cartesian: c,
        reduced,
        identity_residual: (c[0] - (c[1] - c[2])).abs() / scale,
        max_disagreement,
        factor,
        converged: cart.iter().all(|r| r.converged),
    }
}

/// Integrands for `[lhs, main, remainder]` from the value and the Euler
/// derivative at a point with weight norm `rho`.
fn densities(value: Complex64, euler: Complex64, rho: f64, d: f64, p: f64) -> [f64; 3] {
    let w = rho.powf(d / p);
    let u: Complex64 = euler * (p * rho.ln() / w);
    let v = u + value / w;
    [
        value.norm().powf(p) / rho.powf(d),
        p.powf(p) * (euler * rho.ln()).norm().powf(p) / rho.powf(d),
        cp_functional(u, v, p),
    ]
}

fn identity_densities(f: &TestFunction, setting: &Setting, x: &[f64], p: f64) -> Result<[f64; 3]> {
    let pv = f.eval_cartesian(setting, x)?;
    let e = setting.euler_from_gradient(x, &pv.grad);
    Ok(densities(pv.value, e, setting.quasi_norm(x), setting.dimension_parameter(), p))
}

/// 3-D tensor quadrature of the stratified identity terms over `(r, θ, t)`,
/// with `X`, `Y` applied to Cartesian partials at each node.
pub fn heisenberg_spot_check(f: &TestFunction, p: f64, spec: &QuadratureSpec) -> Result<SpotCheck> {
    check_p(p)?;
    let h1 = Setting::StratifiedH1;
    let t = f
        .transverse
        .as_ref()
        .filter(|t| t.dim() == 1)
        .ok_or_else(|| Error::Admissibility("H¹ test functions need a one-dimensional t-factor".into()))?;
    let sup = f.support();
    if !sup.is_compact_away_from_zero() {
        return Err(Error::Admissibility("radial support is not compact in (0, ∞)".into()));
    }
    let mut axes = vec![Axis::new(sup.lo, sup.hi), Axis::new(0.0, 2.0 * PI)];
    axes.extend(t.axes());
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    // r is the outer axis, so consecutive nodes share the radial jet
    let last: RefCell<Option<(f64, [Complex64; 2])>> = RefCell::new(None);
    let density = |a: &[f64]| -> Result<[f64; 3]> {
        let (r, th) = (a[0], a[1]);
        let cached = *last.borrow();
        let radial = match cached {
            Some((r0, v)) if r0 == r => v,
            _ => {
                let j = jet_of(&f.radial, r, 1)?;
                let v = [j.derivs[0], j.derivs[1]];
                *last.borrow_mut() = Some((r, v));
                v
            }
        };
        let omega = [th.cos(), th.sin()];
        let pp = f.eval_polar_with(r, radial, &omega, &a[2..])?;
        let x = [r * omega[0], r * omega[1], a[2]];
        let grad: Vec<Complex64> = pp.grad_first.iter().chain(&pp.grad_transverse).copied().collect();
        let (xf, yf) = HorizontalFrame::apply(&x, &grad);
        Ok(densities(pp.value, xf * x[0] + yf * x[1], r, 2.0, p))
    };
    let term = |i: usize| -> Result<IntegralResult<f64>> {
        integrate_box(
            |a: &[f64]| match density(a) {
                Ok(v) => v[i] * a[0],
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            },
            &axes,
            spec,
        )
    };
    let cart = [term(0)?, term(1)?, term(2)?];
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let red = identity_terms(f, p, &h1, spec)?;
    Ok(summarize(p, cart, [red.lhs.value, red.main.value, red.remainder.value], false))
}

/// 2-D Cartesian quadrature of the identity terms on a homogeneous group in
/// the plane, integrating `x1` over the exact quasi-annulus for each `x2`.
pub fn homogeneous_cartesian_check(f: &TestFunction, p: f64, setting: &Setting, spec: &QuadratureSpec) -> Result<SpotCheck> {
    check_p(p)?;
    let weights = match setting {
        Setting::HomogeneousGroup { weights } if weights.len() == 2 => weights.clone(),
        _ => return Err(Error::Capability("Cartesian check implemented for planar homogeneous groups".into())),
    };
    let sup = f.support();
    if !sup.is_compact_away_from_zero() {
        return Err(Error::Admissibility("radial support is not compact in (0, ∞)".into()));
    }
    let l = weights.iter().fold(1u32, |acc, &w| num_integer_lcm(acc, w));
    let e1 = (2 * l / weights[0]) as f64;
    let e2 = (2 * l / weights[1]) as f64;
    let two_l = (2 * l) as i32;
    // |x1| at which the quasi-norm equals rad for the given x2
    let reach = |rad: f64, x2: f64| -> f64 {
        let rest = rad.powi(two_l) - x2.abs().powf(e2);
        if rest > 0.0 {
            rest.powf(1.0 / e1)
        } else {
            0.0
        }
    };
    let y_hi = sup.hi.powi(weights[1] as i32);
    let y_lo = sup.lo.powi(weights[1] as i32);
    let inner_spec = QuadratureSpec {
        split_points: vec![],
        ..spec.clone()
    };
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let term = |i: usize| -> IntegralResult<f64> {
        let inner_err = Cell::new(0.0);
        let inner_ok = Cell::new(true);
        let calls = Cell::new(0usize);
        let panels = Cell::new(0usize);
        let outer = integrate_with_splits(
            |x2: f64| {
                let (a_lo, a_hi) = (reach(sup.lo, x2), reach(sup.hi, x2));
                if a_hi <= a_lo {
                    return 0.0;
                }
                let r = integrate_with_splits(
                    |x1: f64| {
                        let mut s = 0.0;
                        for x in [[x1, x2], [-x1, x2]] {
                            match identity_densities(f, setting, &x, p) {
                                Ok(v) => s += v[i],
                                Err(e) => {
                                    failure.borrow_mut().get_or_insert(e);
                                    return f64::NAN;
                                }
                            }
                        }
                        s
                    },
                    a_lo,
                    a_hi,
                    &[],
                    &inner_spec,
                );
                inner_err.set(inner_err.get() + r.error_estimate);
                calls.set(calls.get() + 1);
                panels.set(panels.get() + r.panels_used);
                inner_ok.set(inner_ok.get() && r.converged);
                r.value
            },
            -y_hi,
            y_hi,
            &[-y_lo, 0.0, y_lo],
            &inner_spec,
        );
        IntegralResult {
            value: outer.value,
            error_estimate: outer.error_estimate + inner_err.get() / calls.get().max(1) as f64 * 2.0 * y_hi,
            panels_used: outer.panels_used + panels.get(),
            converged: outer.converged && inner_ok.get(),
        }
    };
    let cart = [term(0), term(1), term(2)];
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let red = identity_terms(f, p, setting, spec)?;
    Ok(summarize(
        p,
        cart,
        [red.lhs.value, red.main.value, red.remainder.value],
        !setting.is_isotropic(),
    ))
}

fn num_integer_lcm(a: u32, b: u32) -> u32 {
    fn gcd(a: u32, b: u32) -> u32 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}
