//! First-order and higher-order critical inequalities.

use crate::combinatorics::{odd_double_factorial, to_f64_exact};
use crate::corpus::TestFunction;
use crate::error::{Error, Result};
use crate::geometry::Setting;
use crate::quadrature::{weighted_lp_pow, NormValue, QuadratureSpec, WeightTag};

use super::gradient::{gradient_integral, GradientKind};
use super::identity::{check_p, identity_terms, IdentityTerms, MAX_HIGHER_ORDER};
use super::record::{RecordHead, VerificationRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InequalityKind {
    /// `‖f/w‖_p ≤ p‖L·Ef/w‖_p`
    CriticalSobolev,
    /// `‖f/w‖_p ≤ p‖|x′|^{1−N/p} L ∇f‖_p`
    CriticalHardy,
    /// `p = N`: `‖f/|x′|‖_N ≤ N‖L ∇f‖_N` with the full gradient
    BadialeCritical,
    /// `p = N`: `N^N‖L∇f‖^N ≥ ‖f/|x′|‖^N + ∫C_N`
    BadialeStability,
    /// `‖f/w‖_2 ≤ 2^k/(2k−1)!! ‖T_k/w‖_2`
    HigherOrder { k: usize },
}

impl InequalityKind {
    pub fn statement(&self) -> &'static str {
        match self {
            InequalityKind::CriticalSobolev => "sob-3.1",
            InequalityKind::CriticalHardy => "hardy-3.6",
            InequalityKind::BadialeCritical => "badiale-3.8",
            InequalityKind::BadialeStability => "stability-3.9",
            InequalityKind::HigherOrder { .. } => "higher-ineq-4.5",
        }
    }
}

/// `∫ |x′|^{p−d} |log|x′||^p |∇f|^p` with the gradient proper to the setting
/// (`full` selects `∇` over `∇_N` on cylinders); on homogeneous groups the
/// radial derivative, which reduces to `∫|L·Ef|^p/|x|^Q`.
fn log_gradient_pow(f: &TestFunction, p: f64, full: bool, setting: &Setting, spec: &QuadratureSpec) -> Result<NormValue> {
    let d = setting.dimension_parameter();
    match setting {
        Setting::HomogeneousGroup { .. } => weighted_lp_pow(f, WeightTag::LogEuler(1), p, setting, spec),
        Setting::StratifiedH1 => gradient_integral(f, setting, GradientKind::Horizontal, p - d, p, p, spec),
        Setting::EuclideanCylinder { .. } => {
            let kind = if full { GradientKind::Full } else { GradientKind::FirstBlock };
            gradient_integral(f, setting, kind, p - d, p, p, spec)
        }
    }
}

fn identity_residual(t: &IdentityTerms) -> f64 {
    let scale = t.lhs.value.abs().max(t.main.value.abs()).max(t.remainder.value.abs());
    if scale == 0.0 {
        0.0
    } else {
        (t.lhs.value + t.remainder.value - t.main.value).abs() / scale
    }
}

pub fn verify_inequality(
    f: &TestFunction,
    kind: InequalityKind,
    p: f64,
    setting: &Setting,
    spec: &QuadratureSpec,
) -> Result<VerificationRecord> {
    let d = setting.dimension_parameter();
    let stmt = kind.statement();
    match kind {
        InequalityKind::CriticalSobolev => {
            let t = identity_terms(f, p, setting, spec)?;
            let lhs = t.lhs.powf(1.0 / p);
            let rhs = t.main.powf(1.0 / p);
            let rec = RecordHead::new(stmt, setting, &f.label, &[("p", p)]).inequality(
                &lhs,
                &rhs,
                Some(&t.remainder),
                &[&t.lhs, &t.main, &t.remainder],
            )?;
            Ok(rec.with_param("identity_residual", identity_residual(&t)))
        }
        InequalityKind::CriticalHardy => {
            check_p(p)?;
            let lhs_pow = weighted_lp_pow(f, WeightTag::Critical, p, setting, spec)?;
            let grad = log_gradient_pow(f, p, false, setting, spec)?;
            let lhs = lhs_pow.powf(1.0 / p);
            let rhs = grad.powf(1.0 / p).scale(p);
            RecordHead::new(stmt, setting, &f.label, &[("p", p)]).inequality(&lhs, &rhs, None, &[&lhs_pow, &grad])
        }
        InequalityKind::BadialeCritical | InequalityKind::BadialeStability => {
            if (p - d).abs() > 1e-14 || d < 2.0 {
                return Err(Error::ParameterMismatch(format!(
                    "{stmt} needs p = N ≥ 2, got p = {p} with dimension parameter {d}"
                )));
            }
            let t = identity_terms(f, p, setting, spec)?;
            let grad = log_gradient_pow(f, p, true, setting, spec)?;
            let main = grad.scale(p.powf(p));
            let head = RecordHead::new(stmt, setting, &f.label, &[("p", p)]);
            let parts = [&t.lhs, &grad, &t.remainder];
            if kind == InequalityKind::BadialeCritical {
                let lhs = t.lhs.powf(1.0 / p);
                let rhs = main.powf(1.0 / p);
                let rec = head.inequality(&lhs, &rhs, Some(&t.remainder), &parts)?;
                Ok(rec.with_param("power_gap", main.value - t.lhs.value))
            } else {
                let lhs = t.lhs.add(&t.remainder)?;
                let rec = head.inequality(&lhs, &main, Some(&t.remainder), &parts)?;
                Ok(rec.with_param("identity_residual", identity_residual(&t)))
            }
        }
        InequalityKind::HigherOrder { k } => {
            if k == 0 || k > MAX_HIGHER_ORDER {
                return Err(Error::Domain(format!("need 1 ≤ k ≤ {MAX_HIGHER_ORDER}, got {k}")));
            }
            if p != 2.0 {
                return Err(Error::ParameterMismatch(format!("{stmt} is an L² statement, got p = {p}")));
            }
            let c = 2f64.powi(k as i32) / to_f64_exact(&odd_double_factorial(k as u32)?)?;
            let lhs_pow = weighted_lp_pow(f, WeightTag::Critical, 2.0, setting, spec)?;
            let op_pow = weighted_lp_pow(f, WeightTag::LogEuler(k), 2.0, setting, spec)?;
            let lhs = lhs_pow.powf(0.5);
            let rhs = op_pow.powf(0.5).scale(c);
            RecordHead::new(stmt, setting, &f.label, &[("k", k as f64), ("p", 2.0)]).inequality(
                &lhs,
                &rhs,
                None,
                &[&lhs_pow, &op_pow],
            )
        }
    }
}
