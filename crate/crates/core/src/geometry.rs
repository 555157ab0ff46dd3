//! Geometric settings: Euclidean cylinders, the Heisenberg group H¹ and
//! homogeneous groups with anisotropic dilations.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

use crate::corpus::{AngularFactor, TestFunction};
use crate::error::{Error, Result};
use crate::quadrature::{NormValue, QuadratureSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Setting {
    /// `R^n = R^N × R^{n−N}` with the weight depending on `x′ ∈ R^N`.
    EuclideanCylinder { n: usize, big_n: usize },
    /// H¹ on R³ with `X = ∂x − (y/2)∂t`, `Y = ∂y + (x/2)∂t`.
    StratifiedH1,
    /// R^n with dilation weights `ν` and quasi-norm `(Σ|x_i|^{2l/ν_i})^{1/(2l)}`,
    /// `l = lcm(ν)`.
    HomogeneousGroup { weights: Vec<u32> },
}

impl Setting {
    pub fn euclidean(n: usize, big_n: usize) -> Result<Self> {
        if big_n < 1 || big_n > n {
            return Err(Error::Domain(format!("need 1 ≤ N ≤ n, got n={n}, N={big_n}")));
        }
        Ok(Setting::EuclideanCylinder { n, big_n })
    }

    pub fn homogeneous(weights: Vec<u32>) -> Result<Self> {
        if weights.is_empty() || weights.contains(&0) {
            return Err(Error::Domain("dilation weights must be positive integers".into()));
        }
        Ok(Setting::HomogeneousGroup { weights })
    }

    /// Parses `euclidean:n=3,N=2`, `heisenberg1` or `homogeneous:nu=1,2`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "heisenberg1" {
            return Ok(Setting::StratifiedH1);
        }
        let bad = || Error::Config(format!("unrecognised setting `{s}`"));
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "euclidean" => {
                let mut n = None;
                let mut big_n = None;
                for part in rest.split(',') {
                    let (k, v) = part.split_once('=').ok_or_else(bad)?;
                    let v: usize = v.trim().parse().map_err(|_| bad())?;
                    match k.trim() {
                        "n" => n = Some(v),
                        "N" => big_n = Some(v),
                        _ => return Err(bad()),
                    }
                }
                Setting::euclidean(n.ok_or_else(bad)?, big_n.ok_or_else(bad)?)
            }
            "homogeneous" => {
                let list = rest.strip_prefix("nu=").ok_or_else(bad)?;
                let weights = list
                    .split(',')
                    .map(|w| w.trim().parse::<u32>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>>>()?;
                Setting::homogeneous(weights)
            }
            _ => Err(bad()),
        }
    }

    /// `N` for cylinders and H¹, `Q` for homogeneous groups.
    pub fn dimension_parameter(&self) -> f64 {
        match self {
            Setting::EuclideanCylinder { big_n, .. } => *big_n as f64,
            Setting::StratifiedH1 => 2.0,
            Setting::HomogeneousGroup { weights } => weights.iter().sum::<u32>() as f64,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            Setting::EuclideanCylinder { n, .. } => *n,
            Setting::StratifiedH1 => 3,
            Setting::HomogeneousGroup { weights } => weights.len(),
        }
    }

    /// Dimension of the block the weight sees (`N`, or all of `R^n`).
    pub fn first_block_dim(&self) -> usize {
        match self {
            Setting::EuclideanCylinder { big_n, .. } => *big_n,
            Setting::StratifiedH1 => 2,
            Setting::HomogeneousGroup { weights } => weights.len(),
        }
    }

    pub fn transverse_dim(&self) -> usize {
        self.ambient_dim() - self.first_block_dim()
    }

    pub fn is_homogeneous(&self) -> bool {
        matches!(self, Setting::HomogeneousGroup { .. })
    }

    /// Homogeneous group whose quasi-norm is the Euclidean norm.
    pub fn is_isotropic(&self) -> bool {
        match self {
            Setting::HomogeneousGroup { weights } => weights.iter().all(|&w| w == 1),
            _ => true,
        }
    }

    fn lcm_weight(weights: &[u32]) -> u32 {
        fn gcd(a: u32, b: u32) -> u32 {
            if b == 0 {
                a
            } else {
                gcd(b, a % b)
            }
        }
        weights.iter().fold(1, |acc, &w| acc / gcd(acc, w) * w)
    }

    /// Dilation `δ_λ`.
    pub fn dilate(&self, lambda: f64, x: &[f64]) -> Vec<f64> {
        match self {
            Setting::HomogeneousGroup { weights } => x
                .iter()
                .zip(weights)
                .map(|(xi, &w)| lambda.powi(w as i32) * xi)
                .collect(),
            Setting::StratifiedH1 => vec![lambda * x[0], lambda * x[1], lambda * lambda * x[2]],
            Setting::EuclideanCylinder { .. } => x.iter().map(|xi| lambda * xi).collect(),
        }
    }

    /// The homogeneous quasi-norm; for the other settings, `|x′|`.
    pub fn quasi_norm(&self, x: &[f64]) -> f64 {
        match self {
            Setting::HomogeneousGroup { weights } => {
                let l = Self::lcm_weight(weights);
                let s: f64 = x
                    .iter()
                    .zip(weights)
                    .map(|(xi, &w)| xi.abs().powi((2 * l / w) as i32))
                    .sum();
                s.powf(1.0 / (2 * l) as f64)
            }
            _ => x[..self.first_block_dim()].iter().map(|v| v * v).sum::<f64>().sqrt(),
        }
    }

    /// Gradient of the quasi-norm away from the origin.
    pub fn quasi_norm_gradient(&self, x: &[f64]) -> Vec<f64> {
        let rho = self.quasi_norm(x);
        match self {
            Setting::HomogeneousGroup { weights } => {
                let l = Self::lcm_weight(weights) as i32;
                x.iter()
                    .zip(weights)
                    .map(|(xi, &w)| {
                        let e = 2 * l / w as i32;
                        // d/dx_i of |x_i|^e is e |x_i|^{e-1} sgn x_i; chain through s^{1/(2l)}
                        rho.powi(1 - 2 * l) * xi.abs().powi(e - 1) * xi.signum() * (e as f64) / (2 * l) as f64
                    })
                    .collect()
            }
            _ => {
                let mut g: Vec<f64> = x.iter().map(|_| 0.0).collect();
                for i in 0..self.first_block_dim() {
                    g[i] = x[i] / rho;
                }
                g
            }
        }
    }

    /// Ray coordinates `y_j = x_j / |x|^{ν_j}` on the unit quasi-sphere.
    pub fn ray_coordinates(&self, x: &[f64]) -> Vec<f64> {
        let rho = self.quasi_norm(x);
        match self {
            Setting::HomogeneousGroup { weights } => {
                x.iter().zip(weights).map(|(xi, &w)| xi / rho.powi(w as i32)).collect()
            }
            _ => x[..self.first_block_dim()].iter().map(|v| v / rho).collect(),
        }
    }

    /// Euler-type derivative at a Cartesian point: `x′·∇_N f`, `x X f + y Y f`
    /// or `Σ ν_i x_i ∂_i f = |x| R f`.
    pub fn euler_apply(&self, f: &TestFunction, x: &[f64]) -> Result<Complex64> {
        let pv = f.eval_cartesian(self, x)?;
        Ok(self.euler_from_gradient(x, &pv.grad))
    }

    /// Same as [`Setting::euler_apply`] with a precomputed Cartesian gradient.
    pub fn euler_from_gradient(&self, x: &[f64], grad: &[Complex64]) -> Complex64 {
        match self {
            Setting::EuclideanCylinder { big_n, .. } => (0..*big_n).map(|i| grad[i] * x[i]).sum(),
            Setting::StratifiedH1 => {
                let (xf, yf) = HorizontalFrame::apply(x, grad);
                xf * x[0] + yf * x[1]
            }
            Setting::HomogeneousGroup { weights } => x
                .iter()
                .zip(weights)
                .zip(grad)
                .map(|((xi, &w), g)| g * (w as f64 * xi))
                .sum(),
        }
    }

    /// Measure of the unit sphere `S^{N−1}`, when it is known.
    pub fn sphere_measure(&self) -> Option<f64> {
        if self.is_homogeneous() && !self.is_isotropic() {
            return None;
        }
        Some(sphere_measure(self.first_block_dim()))
    }

    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Setting::EuclideanCylinder { n, big_n } => write!(f, "euclidean:n={n},N={big_n}"),
            Setting::StratifiedH1 => write!(f, "heisenberg1"),
            Setting::HomogeneousGroup { weights } => {
                let w: Vec<String> = weights.iter().map(|w| w.to_string()).collect();
                write!(f, "homogeneous:nu={}", w.join(","))
            }
        }
    }
}

/// `|S^{d−1}|`: 2, 2π, 4π, …
pub fn sphere_measure(d: usize) -> f64 {
    match d {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 2.0 * PI / (d as f64 - 2.0) * sphere_measure(d - 2),
    }
}

/// Left-invariant horizontal frame of H¹.
pub struct HorizontalFrame;

impl HorizontalFrame {
    /// Coefficients of `X` and `Y` in the basis `∂x, ∂y, ∂t`.
    pub fn coefficients(p: &[f64]) -> ([f64; 3], [f64; 3]) {
        ([1.0, 0.0, -p[1] / 2.0], [0.0, 1.0, p[0] / 2.0])
    }

    /// `(Xf, Yf)` from the Cartesian gradient `(f_x, f_y, f_t)`.
    pub fn apply(p: &[f64], grad: &[Complex64]) -> (Complex64, Complex64) {
        let (cx, cy) = Self::coefficients(p);
        let dot = |c: [f64; 3]| grad[0] * c[0] + grad[1] * c[1] + grad[2] * c[2];
        (dot(cx), dot(cy))
    }
}

/// Result of a radial reduction: the radial measure exponent and the common
/// angular × transverse factor for a given power `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reduction {
    /// `d` in `r^{d−1} dr`.
    pub dimension: f64,
    /// `∫|Y|^s dω · ∫|h|^s dx″`, with σ kept symbolic on homogeneous groups.
    pub common: NormValue,
}

/// Splits `∫|f|^s (radial weight) dx` into `r^{d−1}dr` times a common factor.
pub fn radial_reduce(setting: &Setting, f: &TestFunction, s: f64, spec: &QuadratureSpec) -> Result<Reduction> {
    let d = setting.dimension_parameter();
    let tr_dim = setting.transverse_dim();
    match (&f.transverse, tr_dim) {
        (None, k) if k > 0 && !f.is_zero() => {
            return Err(Error::Admissibility(format!(
                "{setting}: a transverse factor is required for compact support in x″"
            )))
        }
        (Some(t), k) if t.dim() != k => {
            return Err(Error::ParameterMismatch(format!(
                "transverse factor has {} coordinates, setting has {k}",
                t.dim()
            )))
        }
        _ => {}
    }
    let transverse = match &f.transverse {
        Some(t) => t.integral_pow(s, spec)?,
        None => NormValue::exact(1.0),
    };
    let angular = match (setting, &f.angular) {
        (Setting::HomogeneousGroup { weights }, None) => {
            if setting.is_isotropic() {
                NormValue::exact(sphere_measure(weights.len()))
            } else {
                NormValue::sigma()
            }
        }
        (Setting::HomogeneousGroup { weights }, Some(AngularFactor::RayPhase { coeffs })) => {
            if coeffs.len() != weights.len() {
                return Err(Error::ParameterMismatch("ray phase length differs from group dimension".into()));
            }
            // unimodular: ∫|φ|^s dσ = σ for every s
            if setting.is_isotropic() {
                NormValue::exact(sphere_measure(weights.len()))
            } else {
                NormValue::sigma()
            }
        }
        (Setting::HomogeneousGroup { .. }, Some(_)) => {
            return Err(Error::ReductionNotApplicable(
                "only unimodular ray phases factor out of the quasi-sphere integral".into(),
            ))
        }
        (_, Some(AngularFactor::RayPhase { .. })) => {
            return Err(Error::ReductionNotApplicable("ray phases belong to homogeneous groups".into()))
        }
        (_, Some(a @ AngularFactor::Spherical { .. })) => {
            if a.sphere_dim() != setting.first_block_dim() {
                return Err(Error::ParameterMismatch("angular factor dimension differs from N".into()));
            }
            a.sphere_integral_pow(s, spec)?
        }
        (_, None) => NormValue::exact(sphere_measure(setting.first_block_dim())),
    };
    Ok(Reduction {
        dimension: d,
        common: angular.mul(&transverse),
    })
}
