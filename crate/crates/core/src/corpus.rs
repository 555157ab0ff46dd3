//! Test functions `f(x) = g(r)·Y(ω)·h(x″)` and seeded corpora of them.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::Setting;
use crate::jets::profile::smooth_step;
use crate::jets::taylor::Series;
use crate::jets::{bump_profile, jet_of, log_power_profile, CutoffSpec, RadialProfile, Support};
use crate::quadrature::{integrate_box, integrate_with_splits, Axis, NormValue, QuadratureSpec};

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// `coeff · ω^powers`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coeff: Complex64,
    pub powers: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AngularFactor {
    /// `Y(ω) = 1 + Σ c·ω^α` restricted to `S^{dim−1}`.
    Spherical { dim: usize, terms: Vec<Monomial> },
    /// `φ(y) = exp(i Σ a_j y_j)` on the quasi-sphere of a homogeneous group.
    RayPhase { coeffs: Vec<f64> },
}

/// Point on `S^{d−1}` from `d−1` angles and the surface Jacobian there.
pub fn sphere_point(dim: usize, angles: &[f64]) -> (Vec<f64>, f64) {
    match dim {
        2 => (vec![angles[0].cos(), angles[0].sin()], 1.0),
        3 => {
            let (th, ph) = (angles[0], angles[1]);
            (vec![th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()], th.sin())
        }
        _ => panic!("angle parametrisation only for S¹ and S²"),
    }
}

/// Angle ranges for `S^{d−1}`, `d ∈ {2, 3}`.
pub fn sphere_axes(dim: usize) -> Vec<Axis> {
    match dim {
        2 => vec![Axis::new(0.0, 2.0 * PI)],
        3 => vec![Axis::new(0.0, PI), Axis::new(0.0, 2.0 * PI)],
        _ => Vec::new(),
    }
}

impl AngularFactor {
    pub fn sphere_dim(&self) -> usize {
        match self {
            AngularFactor::Spherical { dim, .. } => *dim,
            AngularFactor::RayPhase { coeffs } => coeffs.len(),
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            AngularFactor::Spherical { terms, .. } => terms.iter().all(|t| t.coeff == czero()),
            AngularFactor::RayPhase { coeffs } => coeffs.iter().all(|&a| a == 0.0),
        }
    }

    /// Value and gradient of the polynomial (or phase) at a point of `R^d`.
    fn eval_ambient(&self, w: &[f64]) -> (Complex64, Vec<Complex64>) {
        match self {
            AngularFactor::Spherical { terms, .. } => {
                let mut v = Complex64::new(1.0, 0.0);
                let mut g = vec![czero(); w.len()];
                for t in terms {
                    let mono: f64 = w.iter().zip(&t.powers).map(|(x, &e)| x.powi(e as i32)).product();
                    v += t.coeff * mono;
                    for (i, gi) in g.iter_mut().enumerate() {
                        let e = t.powers[i];
                        if e == 0 {
                            continue;
                        }
                        let d: f64 = w
                            .iter()
                            .zip(&t.powers)
                            .enumerate()
                            .map(|(j, (x, &ej))| if j == i { ej as f64 * x.powi(ej as i32 - 1) } else { x.powi(ej as i32) })
                            .product();
                        *gi += t.coeff * d;
                    }
                }
                (v, g)
            }
            AngularFactor::RayPhase { coeffs } => {
                let theta: f64 = coeffs.iter().zip(w).map(|(a, y)| a * y).sum();
                let v = Complex64::new(0.0, theta).exp();
                (v, coeffs.iter().map(|a| v * Complex64::new(0.0, *a)).collect())
            }
        }
    }

    /// `Y(ω)` and its tangential gradient on the unit sphere.
    pub fn eval_sphere(&self, omega: &[f64]) -> (Complex64, Vec<Complex64>) {
        let (v, g) = self.eval_ambient(omega);
        let radial: Complex64 = g.iter().zip(omega).map(|(gi, w)| gi * w).sum();
        let tang = g.iter().zip(omega).map(|(gi, w)| gi - radial * w).collect();
        (v, tang)
    }

    /// `∫_{S^{d−1}} |Y|^s dω`.
    pub fn sphere_integral_pow(&self, s: f64, spec: &QuadratureSpec) -> Result<NormValue> {
        let dim = self.sphere_dim();
        if let AngularFactor::RayPhase { .. } = self {
            return Err(Error::ReductionNotApplicable("ray phases live on quasi-spheres".into()));
        }
        match dim {
            1 => {
                let a = self.eval_sphere(&[1.0]).0.norm().powf(s);
                let b = self.eval_sphere(&[-1.0]).0.norm().powf(s);
                Ok(NormValue::exact(a + b))
            }
            2 | 3 => {
                let spec = QuadratureSpec {
                    split_points: Vec::new(),
                    ..spec.clone()
                };
                let r = integrate_box(
                    |a: &[f64]| {
                        let (w, jac) = sphere_point(dim, a);
                        self.eval_sphere(&w).0.norm().powf(s) * jac
                    },
                    &sphere_axes(dim),
                    &spec,
                )?;
                Ok(NormValue::from_integral(r))
            }
            _ => Err(Error::Capability(format!("angular factors are supported for N ≤ 3, got N = {dim}"))),
        }
    }

    /// `∫_{S^{d−1}} |∇_τ Y|² dω`; zero on `S⁰`.
    pub fn tangential_sq_integral(&self, spec: &QuadratureSpec) -> Result<NormValue> {
        if let AngularFactor::RayPhase { .. } = self {
            return Err(Error::ReductionNotApplicable("ray phases live on quasi-spheres".into()));
        }
        match self.sphere_dim() {
            1 => Ok(NormValue::exact(0.0)),
            dim @ (2 | 3) => {
                let spec = QuadratureSpec {
                    split_points: Vec::new(),
                    ..spec.clone()
                };
                let r = integrate_box(
                    |a: &[f64]| {
                        let (w, jac) = sphere_point(dim, a);
                        self.eval_sphere(&w).1.iter().map(|t| t.norm_sqr()).sum::<f64>() * jac
                    },
                    &sphere_axes(dim),
                    &spec,
                )?;
                Ok(NormValue::from_integral(r))
            }
            dim => Err(Error::Capability(format!("angular factors are supported for N ≤ 3, got N = {dim}"))),
        }
    }
}

/// `exp(−u²/2)·S(7 − |u|)`, `u = (x − center)/sigma`: a Gaussian switched off
/// smoothly between `6σ` and `7σ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianFactor {
    pub center: f64,
    pub sigma: f64,
}

impl GaussianFactor {
    /// Value and derivative.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let u = (x - self.center) / self.sigma;
        if u.abs() >= 7.0 {
            return (0.0, 0.0);
        }
        if u.abs() <= 6.0 {
            let e = (-0.5 * u * u).exp();
            return (e, -u * e / self.sigma);
        }
        let us = Series::variable(u, 2);
        let gauss = (&us * &us).scale_re(-0.5).exp();
        let a = if u < 0.0 { -&us } else { us };
        let cut = smooth_step(&(-&a).add_scalar(Complex64::new(7.0, 0.0)));
        let h = &gauss * &cut;
        (h.c[0].re, h.c[1].re / self.sigma)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - 7.0 * self.sigma, self.center + 7.0 * self.sigma)
    }

    /// `∫|h|^s dx` by quadrature.
    pub fn integral_pow(&self, s: f64, spec: &QuadratureSpec) -> NormValue {
        let (lo, hi) = self.support();
        let c = self.center;
        let w = 6.0 * self.sigma;
        let spec = QuadratureSpec {
            split_points: Vec::new(),
            ..spec.clone()
        };
        NormValue::from_integral(integrate_with_splits(|x: f64| self.eval(x).0.powf(s), lo, hi, &[c - w, c, c + w], &spec))
    }

    /// Untruncated Gaussian value `σ·sqrt(2π/s)`; differs from the truncated
    /// integral by less than `erfc(6·sqrt(s/2))` relatively.
    pub fn closed_form_pow(&self, s: f64) -> f64 {
        self.sigma * (2.0 * PI / s).sqrt()
    }

    /// `∫|h′|² dx` by quadrature.
    pub fn derivative_sq_integral(&self, spec: &QuadratureSpec) -> NormValue {
        let (lo, hi) = self.support();
        let c = self.center;
        let w = 6.0 * self.sigma;
        let spec = QuadratureSpec {
            split_points: Vec::new(),
            ..spec.clone()
        };
        NormValue::from_integral(integrate_with_splits(|x: f64| self.eval(x).1.powi(2), lo, hi, &[c - w, c, c + w], &spec))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transverse {
    pub factors: Vec<GaussianFactor>,
}

impl Transverse {
    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    /// Value and gradient.
    pub fn eval(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let parts: Vec<(f64, f64)> = self.factors.iter().zip(x).map(|(g, &xi)| g.eval(xi)).collect();
        let value: f64 = parts.iter().map(|p| p.0).product();
        let grad = (0..parts.len())
            .map(|i| parts.iter().enumerate().map(|(j, p)| if i == j { p.1 } else { p.0 }).product())
            .collect();
        (value, grad)
    }

    pub fn axes(&self) -> Vec<Axis> {
        self.factors
            .iter()
            .map(|g| {
                let (lo, hi) = g.support();
                let w = 6.0 * g.sigma;
                Axis::with_splits(lo, hi, vec![g.center - w, g.center, g.center + w])
            })
            .collect()
    }

    pub fn integral_pow(&self, s: f64, spec: &QuadratureSpec) -> Result<NormValue> {
        let mut acc = NormValue::exact(1.0);
        for g in &self.factors {
            acc = acc.mul(&g.integral_pow(s, spec));
        }
        Ok(acc)
    }

    pub fn closed_form_pow(&self, s: f64) -> f64 {
        self.factors.iter().map(|g| g.closed_form_pow(s)).product()
    }

    /// `∫|∇h|² dx`.
    pub fn gradient_sq_integral(&self, spec: &QuadratureSpec) -> Result<NormValue> {
        let mut acc = NormValue::exact(0.0);
        for (i, gi) in self.factors.iter().enumerate() {
            let mut term = gi.derivative_sq_integral(spec);
            for (j, gj) in self.factors.iter().enumerate() {
                if i != j {
                    term = term.mul(&gj.integral_pow(2.0, spec));
                }
            }
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }
}

/// Pointwise data in polar form `x = (rω, x″)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarPoint {
    pub value: Complex64,
    /// `∇_N f` in Cartesian components of `R^N`.
    pub grad_first: Vec<Complex64>,
    /// `∇_{x″} f`.
    pub grad_transverse: Vec<Complex64>,
    /// `x′·∇_N f = r g′ Y h`.
    pub euler: Complex64,
}

/// Value and Cartesian gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct PointValue {
    pub value: Complex64,
    pub grad: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub label: String,
    /// The full radial factor (phase included).
    pub radial: RadialProfile,
    /// `(α, β)` of the phase `exp(i(αr + βr²))`, if any.
    pub phase: Option<[f64; 2]>,
    pub angular: Option<AngularFactor>,
    pub transverse: Option<Transverse>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CorpusOptions {
    pub complex: bool,
    pub nonseparable: bool,
}

impl TestFunction {
    pub fn new(
        label: impl Into<String>,
        base: RadialProfile,
        phase: Option<[f64; 2]>,
        angular: Option<AngularFactor>,
        transverse: Option<Transverse>,
    ) -> Self {
        let radial = match phase {
            Some([a, b]) => RadialProfile::Product {
                factors: vec![
                    base,
                    RadialProfile::Phase {
                        linear: a,
                        quadratic: b,
                    },
                ],
            },
            None => base,
        };
        Self {
            label: label.into(),
            radial,
            phase,
            angular,
            transverse,
        }
    }

    pub fn radial_only(label: impl Into<String>, profile: RadialProfile) -> Self {
        Self::new(label, profile, None, None, None)
    }

    pub fn zero() -> Self {
        Self::radial_only("zero", RadialProfile::constant(czero()))
    }

    pub fn is_zero(&self) -> bool {
        matches!(&self.radial, RadialProfile::Polynomial { coeffs } if coeffs.iter().all(|c| *c == czero()))
    }

    /// `λ f`.
    pub fn scaled(&self, lambda: Complex64) -> Self {
        let mut g = self.clone();
        g.radial = RadialProfile::Product {
            factors: vec![RadialProfile::constant(lambda), self.radial.clone()],
        };
        g
    }

    /// Same function with another transverse factor.
    pub fn with_transverse(&self, t: Option<Transverse>) -> Self {
        Self {
            transverse: t,
            ..self.clone()
        }
    }

    pub fn support(&self) -> Support {
        self.radial.support()
    }

    /// Radial in `x′` (or in `|x|`): no angular dependence.
    pub fn is_radial(&self) -> bool {
        self.angular.as_ref().is_none_or(|a| a.is_constant())
    }

    /// Product of a radial, an angular and a transverse factor; always true
    /// for corpus members.
    pub fn is_separable(&self) -> bool {
        true
    }

    pub fn is_complex(&self) -> bool {
        self.radial.is_complex()
            || match &self.angular {
                Some(AngularFactor::Spherical { terms, .. }) => terms.iter().any(|t| t.coeff.im != 0.0),
                Some(AngularFactor::RayPhase { coeffs }) => coeffs.iter().any(|&a| a != 0.0),
                None => false,
            }
    }

    /// Value, gradients and Euler derivative at `(rω, x″)`.
    pub fn eval_polar(&self, r: f64, omega: &[f64], xpp: &[f64]) -> Result<PolarPoint> {
        let jet = jet_of(&self.radial, r, 1)?;
        self.eval_polar_with(r, [jet.derivs[0], jet.derivs[1]], omega, xpp)
    }

    /// [`eval_polar`](Self::eval_polar) with the radial value and derivative
    /// at `r` supplied by the caller.
    pub fn eval_polar_with(&self, r: f64, radial: [Complex64; 2], omega: &[f64], xpp: &[f64]) -> Result<PolarPoint> {
        let [g, gp] = radial;
        let (y, ty) = match &self.angular {
            None => (Complex64::new(1.0, 0.0), vec![czero(); omega.len()]),
            Some(a @ AngularFactor::Spherical { dim, .. }) => {
                if *dim != omega.len() {
                    return Err(Error::ParameterMismatch("angular factor dimension differs from N".into()));
                }
                a.eval_sphere(omega)
            }
            Some(AngularFactor::RayPhase { .. }) => {
                return Err(Error::Capability("ray phases need a homogeneous setting".into()))
            }
        };
        let (h, dh) = match &self.transverse {
            Some(t) => {
                if t.dim() != xpp.len() {
                    return Err(Error::ParameterMismatch("transverse factor dimension differs from n − N".into()));
                }
                t.eval(xpp)
            }
            None => (1.0, vec![0.0; xpp.len()]),
        };
        let grad_first = omega
            .iter()
            .zip(&ty)
            .map(|(w, t)| (gp * y * *w + g * t / r) * h)
            .collect();
        let grad_transverse = dh.iter().map(|d| g * y * *d).collect();
        Ok(PolarPoint {
            value: g * y * h,
            grad_first,
            grad_transverse,
            euler: gp * y * h * r,
        })
    }

    /// Value and Cartesian gradient at `x ∈ R^n`.
    pub fn eval_cartesian(&self, setting: &Setting, x: &[f64]) -> Result<PointValue> {
        let n = setting.ambient_dim();
        if x.len() != n {
            return Err(Error::ParameterMismatch(format!("point has {} coordinates, setting has {n}", x.len())));
        }
        let rho = setting.quasi_norm(x);
        if rho == 0.0 {
            if self.support().lo > 0.0 || self.is_zero() {
                return Ok(PointValue {
                    value: czero(),
                    grad: vec![czero(); n],
                });
            }
            return Err(Error::Domain("evaluation on the singular set".into()));
        }
        match setting {
            Setting::HomogeneousGroup { weights } => {
                let jet = jet_of(&self.radial, rho, 1)?;
                let (g, gp) = (jet.derivs[0], jet.derivs[1]);
                let drho = setting.quasi_norm_gradient(x);
                let y = setting.ray_coordinates(x);
                let (phi, dphi) = match &self.angular {
                    None => (Complex64::new(1.0, 0.0), vec![czero(); n]),
                    Some(a @ AngularFactor::RayPhase { coeffs }) => {
                        if coeffs.len() != n {
                            return Err(Error::ParameterMismatch("ray phase length differs from group dimension".into()));
                        }
                        a.eval_ambient(&y)
                    }
                    Some(AngularFactor::Spherical { .. }) => {
                        return Err(Error::ReductionNotApplicable(
                            "spherical factors are not defined on anisotropic quasi-spheres".into(),
                        ))
                    }
                };
                let grad = (0..n)
                    .map(|i| {
                        // ∂_i y_j = δ_ij ρ^{−ν_j} − ν_j x_j ρ^{−ν_j−1} ∂_i ρ
                        let dy: Complex64 = (0..n)
                            .map(|j| {
                                let nu = weights[j] as i32;
                                let kron = if i == j { rho.powi(-nu) } else { 0.0 };
                                dphi[j] * (kron - nu as f64 * x[j] * rho.powi(-nu - 1) * drho[i])
                            })
                            .sum();
                        gp * drho[i] * phi + g * dy
                    })
                    .collect();
                Ok(PointValue { value: g * phi, grad })
            }
            _ => {
                let big_n = setting.first_block_dim();
                let omega: Vec<f64> = x[..big_n].iter().map(|v| v / rho).collect();
                let pp = self.eval_polar(rho, &omega, &x[big_n..])?;
                let mut grad = pp.grad_first;
                grad.extend(pp.grad_transverse);
                Ok(PointValue { value: pp.value, grad })
            }
        }
    }
}

/// Seeded corpus of admissible test functions for `setting`.
pub fn build_corpus(seed: u64, count: usize, setting: &Setting, options: CorpusOptions) -> Result<Vec<TestFunction>> {
    if count == 0 {
        return Err(Error::Domain("corpus size must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let big_n = setting.first_block_dim();
    let tr_dim = setting.transverse_dim();
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let (center, hw) = if i % 4 == 0 {
            let c: f64 = rng.random_range(0.75..1.25);
            let lo = (c - 1.0).abs() + 0.05;
            let hi = ((c - 1.0).abs() + 0.5).min(c - 0.2);
            (c, rng.random_range(lo..hi))
        } else {
            let c: f64 = rng.random_range(0.3..4.0);
            (c, rng.random_range(0.05..(0.8f64).min(0.8 * c)))
        };
        let b2: f64 = rng.random_range(0.1..0.6);
        let lim = 1.8 * b2.sqrt();
        let b1: f64 = rng.random_range(-lim..lim);
        let base = RadialProfile::Product {
            factors: vec![
                bump_profile(center, hw)?,
                RadialProfile::LogPolynomial {
                    coeffs: vec![Complex64::new(1.0, 0.0), Complex64::new(b1, 0.0), Complex64::new(b2, 0.0)],
                },
            ],
        };
        let complex = options.complex && i % 4 != 3;
        let phase = if complex {
            Some([rng.random_range(-2.0..2.0), rng.random_range(-0.5..0.5)])
        } else {
            None
        };
        let angular = match setting {
            Setting::HomogeneousGroup { weights } => {
                if complex {
                    Some(AngularFactor::RayPhase {
                        coeffs: weights.iter().map(|_| rng.random_range(-1.0..1.0)).collect(),
                    })
                } else {
                    None
                }
            }
            _ if options.nonseparable && (2..=3).contains(&big_n) && i % 2 == 1 => {
                Some(random_spherical(&mut rng, big_n, options.complex))
            }
            _ => None,
        };
        let transverse = if tr_dim > 0 {
            Some(Transverse {
                factors: (0..tr_dim)
                    .map(|_| GaussianFactor {
                        center: rng.random_range(-1.0..1.0),
                        sigma: rng.random_range(0.4..1.5),
                    })
                    .collect(),
            })
        } else {
            None
        };
        out.push(TestFunction::new(format!("f{i:02}"), base, phase, angular, transverse));
    }
    Ok(out)
}

/// `1 + Σ c·ω^α` with `Σ|c| ≤ 0.6`, so `|Y| ≥ 0.4` on the sphere.
fn random_spherical(rng: &mut ChaCha8Rng, dim: usize, complex: bool) -> AngularFactor {
    let candidates: Vec<Vec<u32>> = if dim == 2 {
        vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![2, 0]]
    } else {
        vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, 0], vec![0, 1, 1], vec![2, 0, 0]]
    };
    let count = rng.random_range(2..=3usize);
    let mut terms = Vec::with_capacity(count);
    for _ in 0..count {
        let powers = candidates[rng.random_range(0..candidates.len())].clone();
        let re: f64 = rng.random_range(-1.0..1.0);
        let im: f64 = if complex { rng.random_range(-1.0..1.0) } else { 0.0 };
        let c = Complex64::new(re, im);
        let c = c * (0.2 * rng.random_range(0.2..1.0) / c.norm().max(1e-3));
        terms.push(Monomial { coeff: c, powers });
    }
    AngularFactor::Spherical { dim, terms }
}

/// `ψ_δ(r)(log r)^A`, the extremal family of the sharpness arguments.
pub fn extremal_family(exponent: f64, delta: f64, truncation: Option<f64>) -> Result<RadialProfile> {
    Ok(log_power_profile(exponent, CutoffSpec::new(delta)?, truncation))
}
