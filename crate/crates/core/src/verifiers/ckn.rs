//! The logarithmic CKN family and its uncertainty-type specialisations.

use crate::combinatorics::{odd_double_factorial, to_f64_exact};
use crate::corpus::TestFunction;
use crate::error::{Error, Result};
use crate::geometry::Setting;
use crate::quadrature::{weighted_lp, weighted_lp_pow, QuadratureSpec, WeightTag};

use super::exponents::ExponentTuple;
use super::gradient::{gradient_integral, GradientKind};
use super::identity::{identity_terms, MAX_HIGHER_ORDER};
use super::record::{RecordHead, Verdict, VerificationRecord, INEQUALITY_TOLERANCE};

pub fn ckn_statement(setting: &Setting) -> &'static str {
    match setting {
        Setting::EuclideanCylinder { .. } => "ckn-5.1",
        Setting::StratifiedH1 => "ckn-strat-5.6",
        Setting::HomogeneousGroup { .. } => "ckn-hom-5.9",
    }
}

fn check_dimension(e: &ExponentTuple, setting: &Setting) -> Result<()> {
    let d = setting.dimension_parameter();
    if (e.d - d).abs() > 1e-14 {
        return Err(Error::ParameterMismatch(format!(
            "exponent tuple built for dimension {} used on {setting} (dimension {d})",
            e.d
        )));
    }
    Ok(())
}

fn tuple_params(e: &ExponentTuple) -> Vec<(&'static str, f64)> {
    vec![("p", e.p), ("q", e.q), ("r", e.r), ("delta", e.delta), ("b", e.b), ("c", e.c)]
}

/// `‖|x′|^c f‖_r ≤ p^δ (main − rem/p^p)^{δ/p} ‖|x′|^b f‖_q^{1−δ}`, where
/// `main = ‖L·Ef/w‖_p^p`. The edge cases δ = 0, δ = 1 and (q = p, b = −d/p)
/// are equalities and are judged as identities.
pub fn verify_ckn(f: &TestFunction, e: &ExponentTuple, setting: &Setting, spec: &QuadratureSpec) -> Result<VerificationRecord> {
    check_dimension(e, setting)?;
    let p = e.p;
    let lhs = weighted_lp(f, WeightTag::Power(e.c), e.r, setting, spec)?;
    let b_norm = weighted_lp(f, WeightTag::Power(e.b), e.q, setting, spec)?;
    let t = identity_terms(f, p, setting, spec)?;
    let pp = p.powf(p);
    let op = t.main.scale(1.0 / pp);
    let mut inner = t.main.sub(&t.remainder)?.scale(1.0 / pp);
    inner.value = inner.value.max(0.0);
    let tail = b_norm.powf(1.0 - e.delta);
    let rhs = inner.powf(e.delta / p).scale(p.powf(e.delta)).mul(&tail);
    let without_rem = op.powf(e.delta / p).scale(p.powf(e.delta)).mul(&tail);
    let head = RecordHead::new(ckn_statement(setting), setting, &f.label, &tuple_params(e));
    let rec = if e.is_equality_case() {
        head.identity(&lhs, &rhs, Some(&t.remainder), &[&lhs, &rhs])?
    } else {
        head.inequality(&lhs, &rhs, Some(&t.remainder), &[&lhs, &rhs, &b_norm, &t.main, &t.remainder])?
    };
    Ok(rec
        .with_param("gap_without_remainder", without_rem.value - lhs.value)
        .with_param("remainder_share", without_rem.value - rhs.value))
}

/// Order-`k` variant with constant `(2^k/(2k−1)!!)^δ`; `p = 2`.
pub fn verify_higher_ckn(
    f: &TestFunction,
    k: usize,
    e: &ExponentTuple,
    setting: &Setting,
    spec: &QuadratureSpec,
) -> Result<VerificationRecord> {
    check_dimension(e, setting)?;
    if e.p != 2.0 {
        return Err(Error::ParameterMismatch(format!("higher-order CKN needs p = 2, got {}", e.p)));
    }
    if k == 0 || k > MAX_HIGHER_ORDER {
        return Err(Error::Domain(format!("need 1 ≤ k ≤ {MAX_HIGHER_ORDER}, got {k}")));
    }
    let cst = (2f64.powi(k as i32) / to_f64_exact(&odd_double_factorial(k as u32)?)?).powf(e.delta);
    let lhs = weighted_lp(f, WeightTag::Power(e.c), e.r, setting, spec)?;
    let op = weighted_lp(f, WeightTag::LogEuler(k), 2.0, setting, spec)?;
    let b_norm = weighted_lp(f, WeightTag::Power(e.b), e.q, setting, spec)?;
    let rhs = op.powf(e.delta).mul(&b_norm.powf(1.0 - e.delta)).scale(cst);
    let mut params = tuple_params(e);
    params.push(("k", k as f64));
    let head = RecordHead::new("higher-ckn", setting, &f.label, &params);
    if e.is_trivial() {
        head.identity(&lhs, &rhs, None, &[&lhs, &rhs])
    } else {
        head.inequality(&lhs, &rhs, None, &[&lhs, &op, &b_norm])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UncertaintyKind {
    /// `∫|f|² ≤ d ‖L·Ef/|x′|‖_d ‖|x′| f‖_{d/(d−1)}`
    Critical,
    /// `n = N = 2`: `(∫|f|²)² ≤ 4 ∫L²|ω·∇f|² ∫|x|²|f|²`
    Hpw,
    /// `N = p = 2n/(n−2)`, `q = 1`, `r = 2`, `b = c = −1`
    Nash,
    /// `N = 2k`: `∫|f|² ≤ 2^k/(2k−1)!! ‖T_k/|x′|^k‖_2 ‖|x′|^k f‖_2`
    HigherOrder { k: usize },
}

impl UncertaintyKind {
    pub fn statement(&self, setting: &Setting) -> &'static str {
        match (self, setting) {
            (UncertaintyKind::Critical, Setting::StratifiedH1) => "uncert-strat-5.12",
            (UncertaintyKind::Critical, Setting::HomogeneousGroup { .. }) => "uncert-hom-5.17",
            (UncertaintyKind::Critical, _) => "uncert-5.4",
            (UncertaintyKind::Hpw, _) => "hpw-5.5",
            (UncertaintyKind::Nash, _) => "nash-5.7",
            (UncertaintyKind::HigherOrder { .. }, _) => "higher-uncert",
        }
    }

    /// The exponent tuple this statement specialises.
    pub fn tuple(&self, setting: &Setting) -> Result<ExponentTuple> {
        let d = setting.dimension_parameter();
        match self {
            UncertaintyKind::Critical | UncertaintyKind::Hpw => {
                if d < 2.0 {
                    return Err(Error::Hypothesis(format!(
                        "uncertainty statements need N ≥ 2 so that q = N/(N−1) is finite, got {d}"
                    )));
                }
                if *self == UncertaintyKind::Hpw && *setting != (Setting::EuclideanCylinder { n: 2, big_n: 2 }) {
                    return Err(Error::ParameterMismatch(format!("hpw-5.5 lives on R² with N = 2, got {setting}")));
                }
                ExponentTuple::new(d, d / (d - 1.0), 2.0, 0.5, 1.0, 0.0, d)
            }
            UncertaintyKind::Nash => {
                let n = match setting {
                    Setting::EuclideanCylinder { n, big_n } if (*n == 4 && *big_n == 4) || (*n == 6 && *big_n == 3) => {
                        *n as f64
                    }
                    _ => {
                        return Err(Error::ParameterMismatch(format!(
                            "nash-5.7 needs N = 2n/(n−2) ≤ n, i.e. (n, N) ∈ {{(4, 4), (6, 3)}}, got {setting}"
                        )))
                    }
                };
                ExponentTuple::new(d, 1.0, 2.0, n / (n + 2.0), -1.0, -1.0, d)
            }
            UncertaintyKind::HigherOrder { k } => {
                if *k == 0 || *k > MAX_HIGHER_ORDER {
                    return Err(Error::Domain(format!("need 1 ≤ k ≤ {MAX_HIGHER_ORDER}, got {k}")));
                }
                if !matches!(setting, Setting::EuclideanCylinder { big_n, .. } if *big_n == 2 * k) {
                    return Err(Error::ParameterMismatch(format!("higher-order uncertainty needs N = 2k = {}", 2 * k)));
                }
                ExponentTuple::new(2.0, 2.0, 2.0, 0.5, *k as f64, 0.0, d)
            }
        }
    }
}

pub fn verify_uncertainty(
    f: &TestFunction,
    kind: UncertaintyKind,
    setting: &Setting,
    spec: &QuadratureSpec,
) -> Result<VerificationRecord> {
    let e = kind.tuple(setting)?;
    let stmt = kind.statement(setting);
    let head = RecordHead::new(stmt, setting, &f.label, &tuple_params(&e));
    match kind {
        UncertaintyKind::Critical => {
            let lhs = weighted_lp_pow(f, WeightTag::Power(0.0), 2.0, setting, spec)?;
            let op = weighted_lp(f, WeightTag::LogEuler(1), e.p, setting, spec)?;
            let mom = weighted_lp(f, WeightTag::Power(1.0), e.q, setting, spec)?;
            let rhs = op.mul(&mom).scale(e.p);
            head.inequality(&lhs, &rhs, None, &[&lhs, &op, &mom])
        }
        UncertaintyKind::Hpw => {
            let mass = weighted_lp_pow(f, WeightTag::Power(0.0), 2.0, setting, spec)?;
            let energy = weighted_lp_pow(f, WeightTag::LogEuler(1), 2.0, setting, spec)?;
            let mom = weighted_lp_pow(f, WeightTag::Power(1.0), 2.0, setting, spec)?;
            let full = gradient_integral(f, setting, GradientKind::Full, 0.0, 2.0, 2.0, spec)?;
            let lhs = mass.mul(&mass);
            let rhs = energy.mul(&mom).scale(4.0);
            let relaxed = full.mul(&mom).scale(4.0);
            let mut rec = head.inequality(&lhs, &rhs, None, &[&mass, &energy, &mom, &full])?;
            rec = rec.with_param("rhs_relaxed", relaxed.value);
            if relaxed.value - rhs.value < -INEQUALITY_TOLERANCE {
                rec.verdict = Verdict::Fail;
                rec = rec.with_note("Schwarz relaxation fell below the directional bound");
            }
            Ok(rec)
        }
        UncertaintyKind::Nash => {
            let l2 = weighted_lp(f, WeightTag::Power(-1.0), 2.0, setting, spec)?;
            let l1 = weighted_lp(f, WeightTag::Power(-1.0), 1.0, setting, spec)?;
            let op = weighted_lp(f, WeightTag::LogEuler(1), e.p, setting, spec)?;
            let n = setting.ambient_dim() as f64;
            let lhs = l2.powf(1.0 + 2.0 / n);
            let rhs = op.mul(&l1.powf(2.0 / n)).scale(e.p);
            head.inequality(&lhs, &rhs, None, &[&l2, &l1, &op])
        }
        UncertaintyKind::HigherOrder { k } => {
            let cst = 2f64.powi(k as i32) / to_f64_exact(&odd_double_factorial(k as u32)?)?;
            let lhs = weighted_lp_pow(f, WeightTag::Power(0.0), 2.0, setting, spec)?;
            let op = weighted_lp(f, WeightTag::LogEuler(k), 2.0, setting, spec)?;
            let mom = weighted_lp(f, WeightTag::Power(k as f64), 2.0, setting, spec)?;
            let rhs = op.mul(&mom).scale(cst);
            let rec = head.inequality(&lhs, &rhs, None, &[&lhs, &op, &mom])?;
            Ok(rec.with_param("k", k as f64))
        }
    }
}
