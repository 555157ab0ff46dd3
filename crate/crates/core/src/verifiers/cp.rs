//! The three-term functional `C_p(u, v)`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `|u|^p − |u−v|^p − p|u−v|^{p−2} Re((u−v) v̄)`, with `0^{p−2}·0 = 0`.
pub fn cp_functional(u: Complex64, v: Complex64, p: f64) -> f64 {
    let d = u - v;
    let nd = d.norm();
    let cross = if nd == 0.0 {
        0.0
    } else {
        p * nd.powf(p - 2.0) * (d * v.conj()).re
    };
    u.norm().powf(p) - nd.powf(p) - cross
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CpArguments {
    pub u: Complex64,
    pub v: Complex64,
    pub p: f64,
}

impl CpArguments {
    pub fn new(u: Complex64, v: Complex64, p: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::Domain(format!("C_p needs p > 1, got {p}")));
        }
        Ok(Self { u, v, p })
    }

    pub fn value(&self) -> f64 {
        cp_functional(self.u, self.v, self.p)
    }
}

/// Summary of a seeded sample of `C_p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CpSampleReport {
    pub p: f64,
    pub samples: usize,
    pub min_value: f64,
    /// Empirical `min C_p / |v|^p`; reported, never asserted.
    pub min_ratio_to_v: f64,
    /// Largest `|C_2 − |v|²|` relative to the size of the summands (p = 2 only).
    pub max_c2_deviation: f64,
    /// Largest `|C_p(λu,λv) − |λ|^p C_p(u,v)|` relative to `|λ|^p` times the
    /// condition scale of the unscaled evaluation.
    pub max_homogeneity_residual: f64,
}

fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Size of the terms of `C_p(u, v)`, with the cross term inflated by
/// `|u|/|u−v|`: forming `u − v` from rounded inputs loses that much relative
/// accuracy, which dominates near `u = v` when `p < 2`.
fn condition_scale(u: Complex64, v: Complex64, p: f64) -> f64 {
    let nd = (u - v).norm();
    let nu = u.norm();
    let cross = if nd == 0.0 { 0.0 } else { p * nd.powf(p - 1.0) * v.norm() * (nu / nd).max(1.0) };
    nu.powf(p) + nd.powf(p) + cross
}

pub fn cp_sample(seed: u64, samples: usize, p: f64) -> Result<CpSampleReport> {
    CpArguments::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = CpSampleReport {
        p,
        samples,
        min_value: f64::INFINITY,
        min_ratio_to_v: f64::INFINITY,
        max_c2_deviation: 0.0,
        max_homogeneity_residual: 0.0,
    };
    for i in 0..samples {
        let u = random_complex(&mut rng);
        let mut v = random_complex(&mut rng);
        // keep some degenerate and near-degenerate pairs in the sample
        match i % 50 {
            0 => v = u,
            1 => v = Complex64::new(0.0, 0.0),
            2 => v = u + random_complex(&mut rng) * 1e-6,
            _ => {}
        }
        let c = cp_functional(u, v, p);
        rep.min_value = rep.min_value.min(c);
        let nv = v.norm();
        if nv > 1e-3 {
            rep.min_ratio_to_v = rep.min_ratio_to_v.min(c / nv.powf(p));
        }
        if p == 2.0 {
            let d = u - v;
            let scale = u.norm_sqr() + d.norm_sqr() + 2.0 * d.norm() * nv + nv * nv;
            rep.max_c2_deviation = rep.max_c2_deviation.max((c - v.norm_sqr()).abs() / scale.max(f64::MIN_POSITIVE));
        }
        let lambda = random_complex(&mut rng) * rng.random_range(0.1..10.0);
        let lp = lambda.norm().powf(p);
        let h = (cp_functional(lambda * u, lambda * v, p) - lp * c).abs() / (lp * condition_scale(u, v, p)).max(f64::MIN_POSITIVE);
        rep.max_homogeneity_residual = rep.max_homogeneity_residual.max(h);
    }
    Ok(rep)
}
