//! Derivative jets of radial profiles and the algebra generated by the
//! radial Euler operator `E = r d/dr` and multiplication by `L = log r`.
//!
//! The direct iteration paths here never use the Stirling expansion, so
//! comparing them with [`euler_power_stirling`] is a genuine cross-check.

pub mod profile;
pub mod taylor;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use profile::{bump_profile, jet_of, log_power_profile, CutoffSpec, RadialProfile, Support};

use crate::combinatorics::stirling2;
use crate::error::{Error, Result};
use num_traits::ToPrimitive;

/// Point value and derivatives `g(r), g′(r), …, g^{(K)}(r)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialJet {
    pub r: f64,
    pub derivs: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Step {
    /// `g ↦ r g′`; consumes one order.
    Euler,
    /// `g ↦ log(r) g`; order preserved.
    LogMult,
}

/// Derivatives of `log r` at `r` up to order `k`.
fn log_jet(r: f64, k: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(k + 1);
    out.push(r.ln());
    let mut fact = 1.0; // (i − 1)!
    for i in 1..=k {
        if i > 1 {
            fact *= (i - 1) as f64;
        }
        let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
        out.push(sign * fact / r.powi(i as i32));
    }
    out
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    let mut acc = 1.0;
    for j in 0..k {
        acc = acc * (n - j) as f64 / (j + 1) as f64;
    }
    acc
}

impl RadialJet {
    pub fn order(&self) -> usize {
        self.derivs.len() - 1
    }

    pub fn value(&self) -> Complex64 {
        self.derivs[0]
    }

    pub fn apply_step(&self, step: Step) -> Result<RadialJet> {
        let k = self.order();
        match step {
            Step::Euler => {
                if k == 0 {
                    return Err(Error::OrderExhausted(format!(
                        "Euler step on an order-0 jet at r = {}",
                        self.r
                    )));
                }
                // (r g′)^{(j)} = j g^{(j)} + r g^{(j+1)}
                let derivs = (0..k)
                    .map(|j| self.derivs[j] * j as f64 + self.derivs[j + 1] * self.r)
                    .collect();
                Ok(RadialJet { r: self.r, derivs })
            }
            Step::LogMult => {
                let l = log_jet(self.r, k);
                let derivs = (0..=k)
                    .map(|j| {
                        (0..=j).fold(Complex64::new(0.0, 0.0), |acc, i| {
                            acc + self.derivs[j - i] * (binomial_f64(j, i) * l[i])
                        })
                    })
                    .collect();
                Ok(RadialJet { r: self.r, derivs })
            }
        }
    }

    /// `E^k` applied by `k` Euler steps.
    pub fn euler_power(&self, k: usize) -> Result<RadialJet> {
        let mut j = self.clone();
        for _ in 0..k {
            j = j.apply_step(Step::Euler)?;
        }
        Ok(j)
    }

    /// Values `L^j E^j g` for `j = 0 … order`.
    pub fn logeuler_tower(&self) -> Vec<Complex64> {
        let l = self.r.ln();
        let mut out = Vec::with_capacity(self.derivs.len());
        let mut cur = self.clone();
        let mut lp = 1.0;
        loop {
            out.push(cur.value() * lp);
            if cur.order() == 0 {
                break;
            }
            cur = cur.apply_step(Step::Euler).expect("order checked");
            lp *= l;
        }
        out
    }
}

/// `Σ_i S(k,i) r^i |g^{(i)}|`, the size of the summands of `E^k g`.
fn expansion_size(jet: &RadialJet, k: usize) -> f64 {
    (1..=k)
        .map(|i| stirling_f64(k as u32, i as u32) * jet.r.powi(i as i32) * jet.derivs[i].norm())
        .sum()
}

fn stirling_f64(m: u32, k: u32) -> f64 {
    stirling2(m, k).to_f64().expect("Stirling numbers used here fit in f64")
}

/// `(log r)^k · [(r d/dr)^k g](r)` by direct iteration.
pub fn iterate_logeuler(profile: &RadialProfile, k: usize, r: f64) -> Result<Complex64> {
    let jet = jet_of(profile, r, k)?;
    Ok(jet.euler_power(k)?.value() * r.ln().powi(k as i32))
}

/// `[(r d/dr)^k g](r)` by direct iteration.
pub fn euler_power_direct(profile: &RadialProfile, k: usize, r: f64) -> Result<Complex64> {
    Ok(jet_of(profile, r, k)?.euler_power(k)?.value())
}

/// `[(r d/dr)^k g](r) = Σ_{i=1}^{k} S(k,i) r^i g^{(i)}(r)`.
pub fn euler_power_stirling(profile: &RadialProfile, k: usize, r: f64) -> Result<Complex64> {
    if k == 0 {
        return Err(Error::Domain("Stirling expansion needs k >= 1".into()));
    }
    let jet = jet_of(profile, r, k)?;
    Ok(stirling_expansion(&jet, k))
}

fn stirling_expansion(jet: &RadialJet, k: usize) -> Complex64 {
    (1..=k).fold(Complex64::new(0.0, 0.0), |acc, i| {
        acc + jet.derivs[i] * (stirling_f64(k as u32, i as u32) * jet.r.powi(i as i32))
    })
}

/// Worst residual of one identity family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualSummary {
    pub max_residual: f64,
    /// `(k or κ, r)` where the worst residual occurred.
    pub worst_at: Option<(usize, f64)>,
    pub checks: usize,
}

impl ResidualSummary {
    fn new() -> Self {
        Self {
            max_residual: 0.0,
            worst_at: None,
            checks: 0,
        }
    }

    fn record(&mut self, k: usize, r: f64, diff: Complex64, scale: f64) {
        self.checks += 1;
        let res = if scale > 0.0 { diff.norm() / scale } else { diff.norm() };
        if self.worst_at.is_none() || res > self.max_residual {
            self.max_residual = res;
            self.worst_at = Some((k, r));
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorReport {
    /// Direct `E^k` against the Stirling expansion.
    pub scherk: ResidualSummary,
    /// `L^κE^κ(L E g) = κ L^κE^κ g + L^{κ+1}E^{κ+1} g`.
    pub commutation: ResidualSummary,
    /// `(L E)^m g = Σ_κ S(m,κ) L^κ E^κ g`.
    pub composite: ResidualSummary,
}

impl OperatorReport {
    pub fn max_residual(&self) -> f64 {
        self.scherk
            .max_residual
            .max(self.commutation.max_residual)
            .max(self.composite.max_residual)
    }
}

/// Cross-validates the operator identities for `k, κ ≤ k_max` at each radius.
/// Residuals are relative to the sum of magnitudes of the contributing terms.
pub fn check_operator_identities(
    profile: &RadialProfile,
    k_max: usize,
    sample_radii: &[f64],
) -> Result<OperatorReport> {
    let mut scherk = ResidualSummary::new();
    let mut commutation = ResidualSummary::new();
    let mut composite = ResidualSummary::new();
    for &r in sample_radii {
        let jet = jet_of(profile, r, k_max + 1)?;
        let l = r.ln();

        for k in 1..=k_max {
            let direct = jet.euler_power(k)?.value();
            let terms: Vec<Complex64> = (1..=k)
                .map(|i| jet.derivs[i] * (stirling_f64(k as u32, i as u32) * r.powi(i as i32)))
                .collect();
            let sum: Complex64 = terms.iter().sum();
            let scale = direct.norm() + terms.iter().map(|t| t.norm()).sum::<f64>();
            scherk.record(k, r, direct - sum, scale);
        }

        let tower = jet.logeuler_tower();
        // h = L·E g, carried as a jet of order k_max
        let h = jet.apply_step(Step::Euler)?.apply_step(Step::LogMult)?;
        for kappa in 1..=k_max {
            let lk = l.abs().powi(kappa as i32);
            let lhs = h.euler_power(kappa)?.value() * l.powi(kappa as i32);
            let a = tower[kappa] * kappa as f64;
            let b = tower[kappa + 1];
            // E^κ cancels to zero on log polynomials of low degree, so the
            // summands of its Stirling expansion set the scale too
            let hidden = lk
                * (expansion_size(&h, kappa) + kappa as f64 * expansion_size(&jet, kappa) + l.abs() * expansion_size(&jet, kappa + 1));
            let scale = lhs.norm() + a.norm() + b.norm() + hidden;
            commutation.record(kappa, r, lhs - a - b, scale);
        }

        // (L E)^m by alternating steps on a fresh jet
        let mut cur = jet.clone();
        for m in 1..=k_max {
            cur = cur.apply_step(Step::Euler)?.apply_step(Step::LogMult)?;
            let lhs = cur.value();
            let terms: Vec<Complex64> = (1..=m)
                .map(|kappa| tower[kappa] * stirling_f64(m as u32, kappa as u32))
                .collect();
            let sum: Complex64 = terms.iter().sum();
            let scale = lhs.norm() + terms.iter().map(|t| t.norm()).sum::<f64>();
            composite.record(m, r, lhs - sum, scale);
        }
    }
    Ok(OperatorReport {
        scherk,
        commutation,
        composite,
    })
}
