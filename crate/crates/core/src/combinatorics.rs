//! Exact coefficient systems of the higher-order identity.
//!
//! Everything here is computed with arbitrary-precision integers. The
//! coefficients `O(k, m)` mix powers of four, squared double factorials and
//! products of oblong numbers, and leave the range of `u64` around `k = 10`.
//!
//! Two independent routes exist for every family:
//!
//! * `S(m, κ)` by the explicit alternating sum ([`stirling2`]) and by the
//!   triangle recurrence ([`stirling2_table`]);
//! * `O(k, m)` by explicit enumeration of increasing index tuples
//!   ([`coeff_o`]) and by the four-term recurrence checked in
//!   [`verify_recurrences`].

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `(2k − 1)!! = 1·3·5···(2k − 1)`.
pub fn odd_double_factorial(k: u32) -> Result<BigUint> {
    if k == 0 {
        return Err(Error::Domain("odd double factorial needs k >= 1".into()));
    }
    Ok((1..=k).fold(BigUint::one(), |acc, j| acc * BigUint::from(2 * j - 1)))
}

/// `a_k = ((2k − 1)!!)²`, the normaliser of the order-`k` identity.
pub fn a_coeff(k: u32) -> Result<BigUint> {
    let d = odd_double_factorial(k)?;
    Ok(&d * &d)
}

/// Oblong number `o_i = i(i + 1)`.
pub fn oblong(i: u32) -> Result<BigUint> {
    if i == 0 {
        return Err(Error::Domain("oblong number needs i >= 1".into()));
    }
    Ok(BigUint::from(i) * BigUint::from(i + 1))
}

fn binomial(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for j in 0..k {
        acc = acc * BigUint::from(n - j) / BigUint::from(j + 1);
    }
    acc
}

fn factorial(n: u32) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, j| acc * BigUint::from(j))
}

/// Stirling number of the second kind from the explicit alternating sum
/// `S(m, κ) = (1/κ!) Σ_{i=0}^{κ} (−1)^i C(κ, i) (κ − i)^m`, with `0^0 = 1`.
pub fn stirling2(m: u32, kappa: u32) -> BigUint {
    if kappa > m {
        return BigUint::zero();
    }
    let mut sum = BigInt::zero();
    for i in 0..=kappa {
        let base = BigInt::from(kappa - i);
        let term = BigInt::from_biguint(Sign::Plus, binomial(kappa, i)) * base.pow(m);
        if i % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let q = sum / BigInt::from_biguint(Sign::Plus, factorial(kappa));
    q.to_biguint()
        .expect("alternating Stirling sum is nonnegative")
}

/// Triangle of `S(m, κ)` for `0 ≤ κ ≤ m ≤ m_max` built from
/// `S(m + 1, κ) = κ S(m, κ) + S(m, κ − 1)` and the initial conditions.
/// Row `m` has `m + 1` entries.
pub fn stirling2_table(m_max: u32) -> Vec<Vec<BigUint>> {
    let mut rows: Vec<Vec<BigUint>> = vec![vec![BigUint::one()]];
    for m in 0..m_max {
        let prev = &rows[m as usize];
        let mut next = vec![BigUint::zero(); m as usize + 2];
        for kappa in 1..=(m + 1) {
            let stay = if kappa <= m {
                &prev[kappa as usize] * BigUint::from(kappa)
            } else {
                BigUint::zero()
            };
            next[kappa as usize] = stay + &prev[kappa as usize - 1];
        }
        rows.push(next);
    }
    rows
}

/// Visits every strictly increasing tuple `lo ≤ i_1 < … < i_len ≤ hi`.
fn for_each_increasing_tuple(lo: u32, hi: u32, len: usize, visit: &mut impl FnMut(&[u32])) {
    fn rec(start: u32, hi: u32, len: usize, cur: &mut Vec<u32>, visit: &mut impl FnMut(&[u32])) {
        if cur.len() == len {
            visit(cur);
            return;
        }
        let remaining = (len - cur.len()) as u32;
        let mut i = start;
        while i + remaining - 1 <= hi {
            cur.push(i);
            rec(i + 1, hi, len, cur, visit);
            cur.pop();
            i += 1;
        }
    }
    let mut cur = Vec::with_capacity(len);
    if len == 0 {
        visit(&cur);
        return;
    }
    if lo > hi || (hi - lo + 1) < len as u32 {
        return;
    }
    rec(lo, hi, len, &mut cur, visit);
}

/// `O(k, m)` for `1 ≤ m ≤ k`.
///
/// Interior entries evaluate
/// `Σ_{t=1}^{k−m} 4^{k−t} a_t Σ_{t+1 ≤ i_1 < … < i_r ≤ k−1} Π o_{i_j} + 4^{m−1} a_{k−m+1}`
/// with `r = k − m − t + 1`, enumerating the tuples explicitly.
/// Boundary entries are `O(k, 1) = a_k` and `O(k, k) = 4^{k−1}`.
pub fn coeff_o(k: u32, m: u32) -> Result<BigUint> {
    if m < 1 || m > k {
        return Err(Error::Domain(format!("O(k, m) needs 1 <= m <= k, got k={k}, m={m}")));
    }
    if m == 1 {
        return a_coeff(k);
    }
    if m == k {
        return Ok(BigUint::from(4u32).pow(k - 1));
    }
    let four = BigUint::from(4u32);
    let mut total = BigUint::zero();
    for t in 1..=(k - m) {
        let r = (k - m - t + 1) as usize;
        let mut inner = BigUint::zero();
        for_each_increasing_tuple(t + 1, k - 1, r, &mut |tuple| {
            let prod = tuple
                .iter()
                .fold(BigUint::one(), |acc, &i| acc * oblong(i).expect("i >= 2"));
            inner += prod;
        });
        total += four.pow(k - t) * a_coeff(t)? * inner;
    }
    total += four.pow(m - 1) * a_coeff(k - m + 1)?;
    Ok(total)
}

/// Memoised exact tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinatoricsTable {
    pub k_max: u32,
    /// `a[k − 1] = a_k`.
    pub a: Vec<BigUint>,
    /// `o[i − 1] = o_i`.
    pub oblong: Vec<BigUint>,
    /// `o_table[k − 1][m − 1] = O(k, m)`.
    pub o_table: Vec<Vec<BigUint>>,
    /// `s[m][κ] = S(m, κ)` for `κ ≤ m ≤ m_max`.
    pub s: Vec<Vec<BigUint>>,
}

impl CombinatoricsTable {
    /// Builds all tables bottom-up. The Stirling triangle extends to
    /// `m_max = max(k_max + 1, 20)` so higher-order sums never run off it.
    pub fn build(k_max: u32) -> Result<Self> {
        if k_max == 0 {
            return Err(Error::Domain("table needs k_max >= 1".into()));
        }
        let a = (1..=k_max).map(a_coeff).collect::<Result<Vec<_>>>()?;
        let oblong = (1..=k_max).map(oblong).collect::<Result<Vec<_>>>()?;
        let o_table = (1..=k_max)
            .map(|k| (1..=k).map(|m| coeff_o(k, m)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let s = stirling2_table((k_max + 1).max(20));
        Ok(Self {
            k_max,
            a,
            oblong,
            o_table,
            s,
        })
    }

    pub fn a(&self, k: u32) -> &BigUint {
        &self.a[k as usize - 1]
    }

    pub fn o(&self, k: u32, m: u32) -> &BigUint {
        &self.o_table[k as usize - 1][m as usize - 1]
    }

    /// `S(m, κ)`, zero outside the triangle.
    pub fn s(&self, m: u32, kappa: u32) -> BigUint {
        if kappa > m {
            return BigUint::zero();
        }
        self.s[m as usize][kappa as usize].clone()
    }

    /// Rows `(k, m, O(k,m), a_k)` in row-major order.
    pub fn rows(&self) -> Vec<TableRow> {
        let mut out = Vec::new();
        for k in 1..=self.k_max {
            for m in 1..=k {
                out.push(TableRow {
                    k,
                    m,
                    o_km: self.o(k, m).to_string(),
                    a_k: self.a(k).to_string(),
                });
            }
        }
        out
    }
}

/// One CSV/JSON row of the `O` triangle. Integers are decimal strings so
/// values beyond 2^64 survive any JSON reader.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub k: u32,
    pub m: u32,
    #[serde(rename = "O_km")]
    pub o_km: String,
    pub a_k: String,
}

/// Lossless-or-error conversion for coefficients used in floating-point sums.
pub fn to_f64_exact(x: &BigUint) -> Result<f64> {
    let v = x
        .to_f64()
        .ok_or_else(|| Error::Capability(format!("{x} does not fit in f64")))?;
    if v >= 9_007_199_254_740_992.0 {
        return Err(Error::Capability(format!("{x} exceeds 2^53; not exactly representable")));
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecurrenceKind {
    /// `4k(k+1)·O(k,m) + 4·O(k,m−1) = O(k+1,m)` for `2 ≤ m ≤ k`.
    OblongCoefficient,
    /// `S(m+1,κ) = κ S(m,κ) + S(m,κ−1)`.
    Stirling,
    /// `a_{k+1} = (4k(k+1) + 1)·a_k`.
    DoubleFactorialSquare,
    /// Explicit-sum Stirling number equals the recurrence-built entry.
    StirlingExplicitVsTable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecurrenceCheck {
    pub kind: RecurrenceKind,
    /// `(k, m)` or `(m, κ)` depending on the kind.
    pub indices: (u32, u32),
    pub lhs: String,
    pub rhs: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecurrenceReport {
    pub k_max: u32,
    pub checks: Vec<RecurrenceCheck>,
}

impl RecurrenceReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &RecurrenceCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Checks, in exact arithmetic, every recurrence tying the tables together
/// for indices up to `k_max`. `O(k+1, ·)` is evaluated directly from the
/// explicit sum, never from the recurrence under test.
pub fn verify_recurrences(k_max: u32) -> Result<RecurrenceReport> {
    if k_max < 2 {
        return Err(Error::Domain("verify_recurrences needs k_max >= 2".into()));
    }
    let mut checks = Vec::new();
    let mut push = |kind, indices, lhs: BigUint, rhs: BigUint| {
        checks.push(RecurrenceCheck {
            kind,
            indices,
            pass: lhs == rhs,
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
        });
    };

    for k in 2..=k_max {
        for m in 2..=k {
            let four_oblong = BigUint::from(4u32) * oblong(k)?;
            let lhs = four_oblong * coeff_o(k, m)? + BigUint::from(4u32) * coeff_o(k, m - 1)?;
            push(RecurrenceKind::OblongCoefficient, (k, m), lhs, coeff_o(k + 1, m)?);
        }
    }

    for k in 1..=k_max {
        let factor = BigUint::from(4u32) * oblong(k)? + BigUint::one();
        push(
            RecurrenceKind::DoubleFactorialSquare,
            (k, k + 1),
            factor * a_coeff(k)?,
            a_coeff(k + 1)?,
        );
    }

    let m_max = k_max.max(20);
    let table = stirling2_table(m_max + 1);
    for m in 0..m_max {
        for kappa in 1..=(m + 1) {
            let lhs = stirling2(m + 1, kappa);
            let rhs = BigUint::from(kappa) * stirling2(m, kappa) + stirling2(m, kappa - 1);
            push(RecurrenceKind::Stirling, (m, kappa), lhs, rhs);
        }
    }
    for m in 0..=m_max {
        for kappa in 0..=m {
            push(
                RecurrenceKind::StirlingExplicitVsTable,
                (m, kappa),
                stirling2(m, kappa),
                table[m as usize][kappa as usize].clone(),
            );
        }
    }

    Ok(RecurrenceReport { k_max, checks })
}
