//! Exponent bookkeeping for the logarithmic CKN family.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const TOL: f64 = 1e-14;

/// `(p, q, r, δ, b, c)` for dimension parameter `d` (`N` or `Q`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentTuple {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub delta: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl ExponentTuple {
    /// Checks every hypothesis; `q = 1` is admitted for the Nash case.
    pub fn new(p: f64, q: f64, r: f64, delta: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let all = [p, q, r, delta, b, c, d];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::Hypothesis("exponents must be finite".into()));
        }
        if !(p > 1.0) {
            return Err(Error::Hypothesis(format!("need p > 1, got p = {p}")));
        }
        if !(q >= 1.0) {
            return Err(Error::Hypothesis(format!("need q ≥ 1, got q = {q}")));
        }
        if !(r > 0.0) || !(d > 0.0) {
            return Err(Error::Hypothesis(format!("need r > 0 and d > 0, got r = {r}, d = {d}")));
        }
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::Hypothesis(format!("need δ ∈ [0, 1], got {delta}")));
        }
        let balance = delta * r / p + (1.0 - delta) * r / q;
        if (balance - 1.0).abs() > TOL {
            return Err(Error::Hypothesis(format!(
                "δr/p + (1−δ)r/q = {balance} ≠ 1 for (p, q, r, δ) = ({p}, {q}, {r}, {delta})"
            )));
        }
        let c_expected = -(d / p) * delta + b * (1.0 - delta);
        if (c - c_expected).abs() > TOL * c_expected.abs().max(1.0) {
            return Err(Error::Hypothesis(format!(
                "c = {c} but −(d/p)δ + b(1−δ) = {c_expected}"
            )));
        }
        if delta < (r - q) / r - TOL || delta > p / r + TOL {
            return Err(Error::Hypothesis(format!(
                "δ = {delta} outside [(r−q)/r, p/r] = [{}, {}]",
                (r - q) / r,
                p / r
            )));
        }
        if p + q < r - TOL {
            return Err(Error::Hypothesis(format!("need p + q ≥ r, got {p} + {q} < {r}")));
        }
        Ok(Self { p, q, r, delta, b, c, d })
    }

    /// Solves the balance conditions for `r` and `c`.
    pub fn from_free(p: f64, q: f64, delta: f64, b: f64, d: f64) -> Result<Self> {
        let r = 1.0 / (delta / p + (1.0 - delta) / q);
        let c = -(d / p) * delta + b * (1.0 - delta);
        Self::new(p, q, r, delta, b, c, d)
    }

    pub fn is_trivial(&self) -> bool {
        self.delta == 0.0
    }

    pub fn is_identity_case(&self) -> bool {
        self.delta == 1.0
    }

    /// `q = p` and `b = −d/p`: Hölder holds with equality.
    pub fn is_holder_equality(&self) -> bool {
        (self.q - self.p).abs() <= TOL && (self.b + self.d / self.p).abs() <= TOL
    }

    pub fn is_equality_case(&self) -> bool {
        self.is_trivial() || self.is_identity_case() || self.is_holder_equality()
    }
}
