//! Truncated Taylor series with complex coefficients.
//!
//! A `Series` of length `K + 1` holds `c_0 … c_K` with `f(r + h) = Σ c_j h^j`.
//! Derivatives are recovered as `f^{(j)}(r) = j! c_j`.

use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub c: Vec<Complex64>,
}

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl Series {
    pub fn constant(v: Complex64, len: usize) -> Self {
        let mut c = vec![czero(); len];
        c[0] = v;
        Self { c }
    }

    pub fn real_constant(v: f64, len: usize) -> Self {
        Self::constant(Complex64::new(v, 0.0), len)
    }

    pub fn zero(len: usize) -> Self {
        Self { c: vec![czero(); len] }
    }

    /// The independent variable `r + h` expanded at `r`.
    pub fn variable(r: f64, len: usize) -> Self {
        let mut s = Self::real_constant(r, len);
        if len > 1 {
            s.c[1] = Complex64::new(1.0, 0.0);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    pub fn value(&self) -> Complex64 {
        self.c[0]
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self { c: self.c.iter().map(|x| x * k).collect() }
    }

    pub fn scale_re(&self, k: f64) -> Self {
        Self { c: self.c.iter().map(|x| x * k).collect() }
    }

    pub fn add_scalar(&self, k: Complex64) -> Self {
        let mut s = self.clone();
        s.c[0] += k;
        s
    }

    pub fn recip(&self) -> Self {
        let n = self.len();
        let a0 = self.c[0];
        let inv = Complex64::new(1.0, 0.0) / a0;
        let mut b = vec![czero(); n];
        b[0] = inv;
        for m in 1..n {
            let mut acc = czero();
            for k in 1..=m {
                acc += self.c[k] * b[m - k];
            }
            b[m] = -acc * inv;
        }
        Self { c: b }
    }

    pub fn exp(&self) -> Self {
        let n = self.len();
        let mut e = vec![czero(); n];
        e[0] = self.c[0].exp();
        for m in 1..n {
            let mut acc = czero();
            for k in 1..=m {
                acc += self.c[k] * e[m - k] * (k as f64);
            }
            e[m] = acc / (m as f64);
        }
        Self { c: e }
    }

    /// Principal logarithm; the constant term must be nonzero.
    pub fn ln(&self) -> Self {
        let n = self.len();
        let a0 = self.c[0];
        let mut l = vec![czero(); n];
        l[0] = a0.ln();
        for m in 1..n {
            let mut acc = czero();
            for (k, lk) in l.iter().enumerate().take(m).skip(1) {
                acc += lk * self.c[m - k] * (k as f64);
            }
            l[m] = (self.c[m] - acc / (m as f64)) / a0;
        }
        Self { c: l }
    }

    /// `self^alpha` for a series whose constant term is real and positive.
    pub fn powf(&self, alpha: f64) -> Self {
        let n = self.len();
        let a0 = self.c[0];
        let mut p = vec![czero(); n];
        p[0] = Complex64::new(a0.re.powf(alpha), 0.0);
        for m in 1..n {
            let mut acc = czero();
            for k in 1..=m {
                acc += self.c[k] * p[m - k] * (alpha * k as f64 - (m - k) as f64);
            }
            p[m] = acc / (a0 * m as f64);
        }
        Self { c: p }
    }

    pub fn powi(&self, e: i32) -> Self {
        if e < 0 {
            return self.powi(-e).recip();
        }
        let mut acc = Self::real_constant(1.0, self.len());
        let mut base = self.clone();
        let mut k = e as u32;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    /// `Σ coeffs[j] · self^j` by Horner's rule.
    pub fn polynomial(&self, coeffs: &[Complex64]) -> Self {
        let n = self.len();
        let mut acc = Self::zero(n);
        for &a in coeffs.iter().rev() {
            acc = (&acc * self).add_scalar(a);
        }
        acc
    }

    /// Derivatives `f^{(j)}(r)` for `j = 0 … K`.
    pub fn derivatives(&self) -> Vec<Complex64> {
        let mut fact = 1.0;
        self.c
            .iter()
            .enumerate()
            .map(|(j, &x)| {
                if j > 0 {
                    fact *= j as f64;
                }
                x * fact
            })
            .collect()
    }
}

impl<'a> Add<&'a Series> for &'a Series {
    type Output = Series;
    fn add(self, o: &Series) -> Series {
        Series { c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() }
    }
}

impl<'a> Sub<&'a Series> for &'a Series {
    type Output = Series;
    fn sub(self, o: &Series) -> Series {
        Series { c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        Series { c: self.c.iter().map(|a| -a).collect() }
    }
}

impl<'a> Mul<&'a Series> for &'a Series {
    type Output = Series;
    fn mul(self, o: &Series) -> Series {
        let n = self.len().min(o.len());
        let mut c = vec![czero(); n];
        for i in 0..n {
            if self.c[i] == czero() {
                continue;
            }
            for j in 0..(n - i) {
                c[i + j] += self.c[i] * o.c[j];
            }
        }
        Series { c }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn exp_of_variable_matches_factorials() {
        let x = Series::variable(0.5, 8);
        let d = x.exp().derivatives();
        for v in d {
            assert!(close(v, Complex64::new(0.5f64.exp(), 0.0), 1e-14));
        }
    }

    #[test]
    fn ln_inverts_exp() {
        let x = Series::variable(1.3, 9).scale(Complex64::new(0.7, 0.2));
        let back = x.exp().ln();
        for (a, b) in back.c.iter().zip(&x.c) {
            assert!(close(*a, *b, 1e-13));
        }
    }

    #[test]
    fn recip_times_self_is_one() {
        let x = Series::variable(2.0, 7).polynomial(&[
            Complex64::new(1.0, 0.5),
            Complex64::new(0.3, 0.0),
            Complex64::new(0.0, -0.2),
        ]);
        let one = &x * &x.recip();
        assert!(close(one.c[0], Complex64::new(1.0, 0.0), 1e-14));
        for v in &one.c[1..] {
            assert!(v.norm() < 1e-13);
        }
    }

    #[test]
    fn powf_matches_closed_form() {
        // d^j/dr^j r^a at r = 2
        let a = -0.55;
        let d = Series::variable(2.0, 5).powf(a).derivatives();
        let mut coef = 1.0;
        for (j, v) in d.iter().enumerate() {
            let expected = coef * 2f64.powf(a - j as f64);
            assert!(close(*v, Complex64::new(expected, 0.0), 1e-13), "j={j}");
            coef *= a - j as f64;
        }
    }

    #[test]
    fn powi_negative_base() {
        let x = Series::variable(-0.5, 4);
        let d = x.powi(3).derivatives();
        assert!(close(d[0], Complex64::new(-0.125, 0.0), 1e-15));
        assert!(close(d[1], Complex64::new(0.75, 0.0), 1e-15));
        assert!(close(d[2], Complex64::new(-3.0, 0.0), 1e-15));
        assert!(close(d[3], Complex64::new(6.0, 0.0), 1e-15));
    }
}
