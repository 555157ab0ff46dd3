//! Sharpness sweeps along the extremal family `ψ_δ (log r)^A`.

use serde::{Deserialize, Serialize};

use crate::combinatorics::{a_coeff, to_f64_exact};
use crate::corpus::{extremal_family, TestFunction};
use crate::error::{Error, Result};
use crate::jets::{jet_of, RadialProfile};
use crate::quadrature::{integrate, log_tail_integral, QuadratureSpec};

pub const ASYMPTOTIC_NOTE: &str = "asymptotic evidence only";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SweepStatement {
    /// `p^p ‖L·Eg/w‖_p^p / ‖g/w‖_p^p`, `A = −1/p − ε`.
    CriticalSobolev { p: f64 },
    /// `(4^k/a_k) ‖T_k/w‖² / ‖g/w‖²`, `A = −1/2 − ε`.
    HigherOrder { k: usize },
}

impl SweepStatement {
    pub fn p(&self) -> f64 {
        match self {
            SweepStatement::CriticalSobolev { p } => *p,
            SweepStatement::HigherOrder { .. } => 2.0,
        }
    }

    pub fn order(&self) -> usize {
        match self {
            SweepStatement::CriticalSobolev { .. } => 1,
            SweepStatement::HigherOrder { k } => *k,
        }
    }

    pub fn label(&self) -> String {
        match self {
            SweepStatement::CriticalSobolev { p } => format!("critical-sobolev:p={p}"),
            SweepStatement::HigherOrder { k } => format!("higher-order:k={k}"),
        }
    }

    /// The sharp constant raised to the power used in the quotient.
    fn constant(&self) -> Result<f64> {
        match self {
            SweepStatement::CriticalSobolev { p } => Ok(p.powf(*p)),
            SweepStatement::HigherOrder { k } => Ok(4f64.powi(*k as i32) / to_f64_exact(&a_coeff(*k as u32)?)?),
        }
    }

    /// Ratio of the operator image to `g` on the pure log power `(log r)^A`.
    pub fn tail_ratio(&self, a: f64) -> Result<f64> {
        let c = self.constant()?;
        Ok(match self {
            SweepStatement::CriticalSobolev { p } => c * a.abs().powf(*p),
            SweepStatement::HigherOrder { k } => c * (0..*k).map(|j| (a - j as f64).powi(2)).product::<f64>(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub ratio: f64,
    pub model_prediction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub statement: String,
    pub delta: f64,
    pub window_end: f64,
    pub bound: f64,
    pub rows: Vec<SweepRow>,
    pub above_one: bool,
    pub decreasing: bool,
    pub within_bound: bool,
    pub converged: bool,
    pub note: String,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.above_one && self.decreasing && self.within_bound && self.converged
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("epsilon,ratio,model_prediction\n");
        for r in &self.rows {
            s.push_str(&format!("{:e},{},{}\n", r.epsilon, r.ratio, r.model_prediction));
        }
        s
    }
}

pub const RATIO_FLOOR_TOLERANCE: f64 = 1e-9;

/// Quotient for a single `ε`: quadrature on `[1+δ, window_end]`, closed form beyond.
pub fn sweep_ratio(stmt: SweepStatement, epsilon: f64, delta: f64, window_end: f64, spec: &QuadratureSpec) -> Result<(f64, bool)> {
    let p = stmt.p();
    let k = stmt.order();
    let a = -1.0 / p - epsilon;
    if !(p * a < -1.0) {
        return Err(Error::Divergence(format!("pA = {} must be below −1", p * a)));
    }
    if !(window_end >= 1.0 + 2.0 * delta) {
        return Err(Error::Domain("the window must contain the whole cutoff band".into()));
    }
    let profile = extremal_family(a, delta, None)?;
    let f = TestFunction::radial_only("extremal", RadialProfile::Product { factors: vec![profile] });
    let c = stmt.constant()?;
    let lo = 1.0 + delta;
    let num = integrate(
        |r: f64| match jet_of(&f.radial, r, k) {
            Ok(j) => j.logeuler_tower()[k].norm().powf(p) / r,
            Err(_) => f64::NAN,
        },
        lo,
        window_end,
        spec,
    );
    let den = integrate(
        |r: f64| match jet_of(&f.radial, r, 0) {
            Ok(j) => j.value().norm().powf(p) / r,
            Err(_) => f64::NAN,
        },
        lo,
        window_end,
        spec,
    );
    let tail = log_tail_integral(p * a, window_end)?;
    let ratio = (c * num.value + stmt.tail_ratio(a)? * tail) / (den.value + tail);
    Ok((ratio, num.converged && den.converged))
}

/// Runs the sweep; `bound` is the allowed excess of the last ratio over 1.
pub fn sharpness_sweep(
    stmt: SweepStatement,
    delta: f64,
    eps_list: &[f64],
    bound: f64,
    spec: &QuadratureSpec,
) -> Result<SweepReport> {
    if eps_list.is_empty() {
        return Err(Error::Domain("empty ε list".into()));
    }
    if eps_list.iter().any(|&e| !(e > 0.0 && e <= 0.2)) {
        return Err(Error::Domain("ε values must lie in (0, 0.2]".into()));
    }
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Domain("ε list must be strictly decreasing".into()));
    }
    let window_end = 1.0 + 2.0 * delta + 1.0;
    let mut rows = Vec::with_capacity(eps_list.len());
    let mut converged = true;
    for &eps in eps_list {
        let (ratio, ok) = sweep_ratio(stmt, eps, delta, window_end, spec)?;
        converged &= ok;
        let a = -1.0 / stmt.p() - eps;
        rows.push(SweepRow {
            epsilon: eps,
            ratio,
            model_prediction: stmt.tail_ratio(a)?,
        });
    }
    let above_one = rows.iter().all(|r| r.ratio >= 1.0 - RATIO_FLOOR_TOLERANCE);
    let decreasing = rows.windows(2).all(|w| w[1].ratio < w[0].ratio);
    let within_bound = rows.last().is_some_and(|r| r.ratio <= 1.0 + bound);
    Ok(SweepReport {
        statement: stmt.label(),
        delta,
        window_end,
        bound,
        rows,
        above_one,
        decreasing,
        within_bound,
        converged,
        note: ASYMPTOTIC_NOTE.into(),
    })
}

/// Quotient on the pure log power `(log r)^A` over `[r0, ∞)`: quadrature on
/// `[r0, big_r]` plus the closed-form tail. Returns `(computed, (p|A|)^p)`.
pub fn log_power_quotient(p: f64, a: f64, r0: f64, big_r: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    if !(p * a < -1.0) {
        return Err(Error::Divergence(format!("pA = {} must be below −1", p * a)));
    }
    if !(r0 > 1.0 && big_r > r0) {
        return Err(Error::Domain("need 1 < r0 < R".into()));
    }
    let g = RadialProfile::LogPower {
        exponent: a,
        cutoff: None,
        truncation: None,
    };
    let f = TestFunction::radial_only("log-power", g);
    let window = |order: usize| -> Result<f64> {
        let spec = QuadratureSpec {
            split_points: vec![],
            ..spec.clone()
        };
        let res = integrate(
            |r: f64| match jet_of(&f.radial, r, order) {
                Ok(j) => j.logeuler_tower()[order].norm().powf(p) / r,
                Err(_) => f64::NAN,
            },
            r0,
            big_r,
            &spec,
        );
        res.ok()
    };
    let tail = log_tail_integral(p * a, big_r)?;
    let num = p.powf(p) * (window(1)? + a.abs().powf(p) * tail);
    let den = window(0)? + tail;
    Ok((num / den, (p * a.abs()).powf(p)))
}
