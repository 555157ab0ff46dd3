//! Gradient norms by tensor quadrature over `(r, angles, x″)`.

use num_complex::Complex64;
use std::cell::RefCell;

use crate::corpus::{sphere_axes, sphere_point, AngularFactor, TestFunction};
use crate::error::{Error, Result};
use crate::jets::jet_of;
use crate::geometry::{sphere_measure, HorizontalFrame, Setting};
use crate::quadrature::{integrate, integrate_box, Axis, NormValue, QuadratureSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientKind {
    /// `∇_N`, the gradient in `x′`.
    FirstBlock,
    /// The full gradient in `R^n`.
    Full,
    /// `(Xf, Yf)` on H¹.
    Horizontal,
}

/// `∫ |x′|^a |log|x′||^b |G f|^s dx` for the gradient `G` of `kind`.
///
/// Angles are integrated only when the angular factor is non-constant and
/// `x″` only when the gradient sees it; otherwise the missing factors are
/// multiplied in from their closed or one-dimensional integrals.
pub fn gradient_integral(
    f: &TestFunction,
    setting: &Setting,
    kind: GradientKind,
    a: f64,
    b: f64,
    s: f64,
    spec: &QuadratureSpec,
) -> Result<NormValue> {
    if setting.is_homogeneous() {
        return Err(Error::Capability(
            "homogeneous groups use the radial derivative, not a Cartesian gradient".into(),
        ));
    }
    if (kind == GradientKind::Horizontal) != matches!(setting, Setting::StratifiedH1) {
        return Err(Error::ParameterMismatch(format!("{kind:?} gradient does not belong to {setting}")));
    }
    match (&f.transverse, setting.transverse_dim()) {
        (None, k) if k > 0 => {
            return Err(Error::Admissibility(format!(
                "{setting}: a transverse factor is required for compact support in x″"
            )))
        }
        (Some(t), k) if t.dim() != k => {
            return Err(Error::ParameterMismatch("transverse factor dimension differs from n − N".into()))
        }
        _ => {}
    }
    if let Some(AngularFactor::RayPhase { .. }) = f.angular {
        return Err(Error::Capability("ray phases need a homogeneous setting".into()));
    }
    let sup = f.support();
    if f.is_zero() || sup.lo >= sup.hi {
        return Ok(NormValue::exact(0.0));
    }
    if !sup.is_compact_away_from_zero() {
        return Err(Error::Admissibility(format!("{}: radial support is not compact in (0, ∞)", f.label)));
    }

    if s == 2.0 && kind != GradientKind::Horizontal {
        return split_square(f, setting, kind, a, b, spec);
    }
    tensor_path(f, setting, kind, a, b, s, spec)
}

/// `s = 2`: `|∇f|² = |g′|²|Y|²h² + |g|²|∇_τY|²h²/r² + |g|²|Y|²|∇h|²`, each
/// term a product of one-dimensional (or spherical) integrals.
fn split_square(f: &TestFunction, setting: &Setting, kind: GradientKind, a: f64, b: f64, spec: &QuadratureSpec) -> Result<NormValue> {
    let big_n = setting.first_block_dim() as f64;
    let sup = f.support();
    let radial = |shift: f64, deriv: usize| -> Result<NormValue> {
        let failure: RefCell<Option<Error>> = RefCell::new(None);
        let res = integrate(
            |r: f64| match jet_of(&f.radial, r, deriv) {
                Ok(j) => r.powf(big_n - 1.0 + a + shift) * r.ln().abs().powf(b) * j.derivs[deriv].norm_sqr(),
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            },
            sup.lo,
            sup.hi,
            spec,
        );
        match failure.into_inner() {
            Some(e) => Err(e),
            None => Ok(NormValue::from_integral(res)),
        }
    };
    let (a0, a1) = match &f.angular {
        Some(y) if !y.is_constant() => (y.sphere_integral_pow(2.0, spec)?, y.tangential_sq_integral(spec)?),
        _ => (NormValue::exact(sphere_measure(setting.first_block_dim())), NormValue::exact(0.0)),
    };
    let (h0, h1) = match &f.transverse {
        Some(t) => (t.integral_pow(2.0, spec)?, t.gradient_sq_integral(spec)?),
        None => (NormValue::exact(1.0), NormValue::exact(0.0)),
    };
    let mut out = radial(0.0, 1)?.mul(&a0).mul(&h0);
    if a1.value != 0.0 {
        out = out.add(&radial(-2.0, 0)?.mul(&a1).mul(&h0))?;
    }
    if kind == GradientKind::Full && h1.value != 0.0 {
        out = out.add(&radial(0.0, 0)?.mul(&a0).mul(&h1))?;
    }
    Ok(out)
}

/// Direct tensor quadrature of `|x′|^a |log|x′||^b |G f|^s`.
pub(crate) fn tensor_path(
    f: &TestFunction,
    setting: &Setting,
    kind: GradientKind,
    a: f64,
    b: f64,
    s: f64,
    spec: &QuadratureSpec,
) -> Result<NormValue> {
    let big_n = setting.first_block_dim();
    let tr = setting.transverse_dim();
    let transverse = f.transverse.clone();
    let sup = f.support();
    let non_radial = !f.is_radial();
    let angles_integrated = non_radial && big_n >= 2;
    let transverse_integrated = tr > 0 && kind != GradientKind::FirstBlock;
    let n_angles = if angles_integrated { big_n - 1 } else { 0 };

    let mut axes = vec![Axis::new(sup.lo, sup.hi)];
    if angles_integrated {
        axes.extend(sphere_axes(big_n));
    }
    if transverse_integrated {
        axes.extend(transverse.as_ref().map(|t| t.axes()).unwrap_or_default());
    }
    // points where the transverse factor equals 1
    let centers: Vec<f64> = transverse
        .as_ref()
        .map(|t| t.factors.iter().map(|g| g.center).collect())
        .unwrap_or_default();

    let mut e1 = vec![0.0; big_n];
    e1[0] = 1.0;
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    // r is the outer axis, so consecutive nodes share it
    let last: RefCell<Option<(f64, [Complex64; 2])>> = RefCell::new(None);
    let integrand = |x: &[f64]| -> f64 {
        let r = x[0];
        let cached = *last.borrow();
        let radial = match cached {
            Some((r0, v)) if r0 == r => v,
            _ => match jet_of(&f.radial, r, 1) {
                Ok(j) => {
                    let v = [j.derivs[0], j.derivs[1]];
                    *last.borrow_mut() = Some((r, v));
                    v
                }
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    return f64::NAN;
                }
            },
        };
        let directions: Vec<(Vec<f64>, f64)> = if angles_integrated {
            vec![sphere_point(big_n, &x[1..1 + n_angles])]
        } else if big_n == 1 && non_radial {
            vec![(vec![1.0], 1.0), (vec![-1.0], 1.0)]
        } else {
            vec![(e1.clone(), 1.0)]
        };
        let xpp: &[f64] = if transverse_integrated { &x[1 + n_angles..] } else { &centers };
        let mut acc = 0.0;
        for (omega, jac) in &directions {
            let pp = match f.eval_polar_with(r, radial, omega, xpp) {
                Ok(pp) => pp,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    return f64::NAN;
                }
            };
            let sq_first: f64 = pp.grad_first.iter().map(|g| g.norm_sqr()).sum();
            let g2 = match kind {
                GradientKind::FirstBlock => sq_first,
                GradientKind::Full => sq_first + pp.grad_transverse.iter().map(|g| g.norm_sqr()).sum::<f64>(),
                GradientKind::Horizontal => {
                    let point = [r * omega[0], r * omega[1], xpp[0]];
                    let grad: Vec<Complex64> = pp.grad_first.iter().chain(&pp.grad_transverse).copied().collect();
                    let (xf, yf) = HorizontalFrame::apply(&point, &grad);
                    xf.norm_sqr() + yf.norm_sqr()
                }
            };
            acc += jac * g2.powf(0.5 * s);
        }
        r.powf(big_n as f64 - 1.0 + a) * r.ln().abs().powf(b) * acc
    };
    let res = integrate_box(integrand, &axes, spec)?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let mut out = NormValue::from_integral(res);
    if !angles_integrated && !(big_n == 1 && non_radial) {
        out = out.scale(sphere_measure(big_n));
    }
    if !transverse_integrated {
        if let Some(t) = &transverse {
            out = out.mul(&t.integral_pow(s, spec)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_corpus, CorpusOptions};

    #[test]
    fn split_square_matches_tensor_path() {
        let spec = QuadratureSpec::default();
        let o = CorpusOptions {
            complex: true,
            nonseparable: true,
        };
        for (n, big_n) in [(2, 2), (3, 2), (2, 1)] {
            let s = Setting::euclidean(n, big_n).unwrap();
            let c = build_corpus(3, 2, &s, o).unwrap();
            for f in &c {
                for kind in [GradientKind::FirstBlock, GradientKind::Full] {
                    let a = gradient_integral(f, &s, kind, 0.3, 2.0, 2.0, &spec).unwrap().value;
                    let b = tensor_path(f, &s, kind, 0.3, 2.0, 2.0, &spec).unwrap().value;
                    assert!((a - b).abs() <= 1e-9 * b, "{s} {} {kind:?}: {a} vs {b}", f.label);
                }
            }
        }
    }
}
