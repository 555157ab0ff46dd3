//! First-order and higher-order sharp remainder identities.

use crate::combinatorics::{to_f64_exact, CombinatoricsTable};
use crate::corpus::TestFunction;
use crate::error::{Error, Result};
use crate::geometry::{radial_reduce, Setting};
use crate::quadrature::weighted::radial_integral;
use crate::quadrature::{weighted_lp_pow, NormValue, QuadratureSpec, WeightTag};

use super::cp::cp_functional;
use super::record::{RecordHead, VerificationRecord};

/// The three terms of `‖f/w‖_p^p = p^p‖L·Ef/w‖_p^p − ∫C_p(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityTerms {
    pub lhs: NormValue,
    pub main: NormValue,
    pub remainder: NormValue,
}

impl IdentityTerms {
    /// `main − remainder`.
    pub fn rhs(&self) -> Result<NormValue> {
        self.main.sub(&self.remainder)
    }
}

pub(crate) fn check_p(p: f64) -> Result<()> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::Domain(format!("need p > 1, got {p}")));
    }
    Ok(())
}

pub fn identity_terms(f: &TestFunction, p: f64, setting: &Setting, spec: &QuadratureSpec) -> Result<IdentityTerms> {
    check_p(p)?;
    let lhs = weighted_lp_pow(f, WeightTag::Critical, p, setting, spec)?;
    let main = weighted_lp_pow(f, WeightTag::LogEuler(1), p, setting, spec)?.scale(p.powf(p));
    // u = p·L·Ef/w and v = u + f/w; the common angular factor is pulled out by
    // the joint homogeneity of C_p
    let rem = radial_integral(f, 1, spec, |r, t| {
        let u = t[1] * p;
        cp_functional(u, u + t[0], p) / r
    })?;
    let common = radial_reduce(setting, f, p, spec)?.common;
    Ok(IdentityTerms {
        lhs,
        main,
        remainder: NormValue::from_integral(rem).mul(&common),
    })
}

pub fn identity_statement(setting: &Setting) -> &'static str {
    match setting {
        Setting::EuclideanCylinder { .. } => "id-3.2",
        Setting::StratifiedH1 => "strat-id-3.5",
        Setting::HomogeneousGroup { .. } => "hom-id-3.8",
    }
}

pub fn verify_identity(f: &TestFunction, p: f64, setting: &Setting, spec: &QuadratureSpec) -> Result<VerificationRecord> {
    let t = identity_terms(f, p, setting, spec)?;
    let rhs = t.rhs()?;
    RecordHead::new(identity_statement(setting), setting, &f.label, &[("p", p)]).identity(
        &t.lhs,
        &rhs,
        Some(&t.remainder),
        &[&t.lhs, &t.main, &t.remainder],
    )
}

/// At `p = 2`: `∫C_2(u, v)` against `‖f/w + 2 L·Ef/w‖²`.
pub fn consistency_triangle(f: &TestFunction, setting: &Setting, spec: &QuadratureSpec) -> Result<VerificationRecord> {
    let t = identity_terms(f, 2.0, setting, spec)?;
    let common = radial_reduce(setting, f, 2.0, spec)?.common;
    let sq = radial_integral(f, 1, spec, |r, t| (t[0] + t[1] * 2.0).norm_sqr() / r)?;
    let direct = NormValue::from_integral(sq).mul(&common);
    RecordHead::new("consistency-p2", setting, &f.label, &[("p", 2.0)]).identity(
        &t.remainder,
        &direct,
        None,
        &[&t.remainder, &direct],
    )
}

/// Terms of the order-`k` identity at `p = 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct HigherOrderTerms {
    pub k: usize,
    /// `(4^k / a_k) ‖T_k/w‖²`
    pub lhs: NormValue,
    /// `‖f/w‖²`
    pub base: NormValue,
    /// `(O(k,m)/a_k) ‖B_m/w‖²` for `m = 1 … k`.
    pub weighted_terms: Vec<NormValue>,
}

impl HigherOrderTerms {
    pub fn remainder(&self) -> Result<NormValue> {
        let mut acc = self.weighted_terms[0];
        for t in &self.weighted_terms[1..] {
            acc = acc.add(t)?;
        }
        Ok(acc)
    }

    pub fn rhs(&self) -> Result<NormValue> {
        self.base.add(&self.remainder()?)
    }
}

pub const MAX_HIGHER_ORDER: usize = 4;

pub fn higher_order_terms(f: &TestFunction, k: usize, setting: &Setting, spec: &QuadratureSpec) -> Result<HigherOrderTerms> {
    if k == 0 || k > MAX_HIGHER_ORDER {
        return Err(Error::Domain(format!("higher-order identity needs 1 ≤ k ≤ {MAX_HIGHER_ORDER}, got {k}")));
    }
    let table = CombinatoricsTable::build(k as u32)?;
    let a_k = to_f64_exact(table.a(k as u32))?;
    let four_k = 4f64.powi(k as i32);
    let common = radial_reduce(setting, f, 2.0, spec)?.common;
    let lhs = weighted_lp_pow(f, WeightTag::LogEuler(k), 2.0, setting, spec)?.scale(four_k / a_k);
    let base = weighted_lp_pow(f, WeightTag::Critical, 2.0, setting, spec)?;
    let mut weighted_terms = Vec::with_capacity(k);
    for m in 1..=k {
        let m32 = m as u32;
        // B_m = Σ_{l<m} S(m−1,l) T_l + 2 Σ_{κ=1}^{m} S(m,κ) T_κ
        let mut coef = vec![0.0; k + 1];
        for (l, c) in coef.iter_mut().enumerate().take(m) {
            *c += to_f64_exact(&table.s(m32 - 1, l as u32))?;
        }
        for (kappa, c) in coef.iter_mut().enumerate().take(m + 1).skip(1) {
            *c += 2.0 * to_f64_exact(&table.s(m32, kappa as u32))?;
        }
        let o = to_f64_exact(table.o(k as u32, m32))?;
        let integral = radial_integral(f, m, spec, |r, t| {
            let b: num_complex::Complex64 = t.iter().zip(&coef).map(|(ti, c)| ti * *c).sum();
            b.norm_sqr() / r
        })?;
        weighted_terms.push(NormValue::from_integral(integral).mul(&common).scale(o / a_k));
    }
    Ok(HigherOrderTerms {
        k,
        lhs,
        base,
        weighted_terms,
    })
}

pub fn verify_higher_order_identity(
    f: &TestFunction,
    k: usize,
    setting: &Setting,
    spec: &QuadratureSpec,
) -> Result<VerificationRecord> {
    let t = higher_order_terms(f, k, setting, spec)?;
    let rem = t.remainder()?;
    let rhs = t.rhs()?;
    let mut parts = vec![&t.lhs, &t.base];
    parts.extend(t.weighted_terms.iter());
    let min_term = t.weighted_terms.iter().map(|w| w.value).fold(f64::INFINITY, f64::min);
    let rec = RecordHead::new("higher-4.1", setting, &f.label, &[("k", k as f64), ("p", 2.0)]).identity(
        &t.lhs,
        &rhs,
        Some(&rem),
        &parts,
    )?;
    Ok(rec.with_param("min_weighted_term", min_term))
}
