use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::system::{Parameter, Truncation};

/// Dyadic blocks summed explicitly past the first tail block before switching
/// to the geometric remainder.
const EXPLICIT_BLOCKS: u32 = 48;

/// Two independent upper bounds on `Σ_{b ∉ F(N)} sup_X |φ_b'|^t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    /// Dyadic-block route: stragglers summed exactly, then one bound per block `K(p)`.
    pub dyadic: f64,
    /// Lattice-count route: exact band sum, then a sector-area count of the far field.
    pub lattice: f64,
}

impl TailBound {
    pub fn value(&self) -> f64 {
        self.dyadic.min(self.lattice)
    }
}

/// `sup_X |φ_b'|^t = (|b + 1/2| - 1/2)^(-2t)`.
#[inline]
pub(crate) fn letter_sup_pow(b: Complex64, t: f64) -> f64 {
    ((b + 0.5).norm() - 0.5).powf(-2.0 * t)
}

/// Number of letters with `max(m, n)` in `[2^(p-1), 2^p)`.
pub fn block_size(p: u32) -> u128 {
    let h = 1u128 << (p - 1);
    h * (3 * h - 2)
}

/// Sum of `sup^t` over letters with `lo < max(m, n) ≤ hi`.
pub(crate) fn band_sum(tau: &Parameter, t: f64, lo: u64, hi: u64) -> f64 {
    let tau = tau.tau();
    let mut sum = 0.0;
    for k in lo + 1..=hi {
        let kf = k as f64;
        for j in 1..=k {
            sum += letter_sup_pow(Complex64::new(kf, 0.0) + tau * j as f64, t);
        }
        for j in 1..k {
            sum += letter_sup_pow(Complex64::new(j as f64, 0.0) + tau * kf, t);
        }
    }
    sum
}

fn dyadic_bound(tau: &Parameter, t: f64, n: u64) -> f64 {
    let mut p0 = 1u32;
    while (1u64 << (p0 - 1)) <= n {
        p0 += 1;
    }
    let stragglers = band_sum(tau, t, n, (1u64 << (p0 - 1)) - 1);
    let tau2 = tau.tau().norm_sqr();
    let last = p0 + EXPLICIT_BLOCKS;
    let mut blocks = 0.0;
    for p in p0..=last {
        let scale = 4f64.powi(p as i32 - 1);
        let b2 = scale * (1.0 + tau2 / scale).min(tau2);
        blocks += block_size(p) as f64 * (b2.sqrt() - 0.5).powf(-2.0 * t);
    }
    // Past `last`, |b| ≥ 2^(p-1) and |K(p)| ≤ 3·4^(p-1).
    let c = (1.0 - 0.5f64.powi(last as i32 + 1)).powf(-2.0 * t);
    let ratio = 4f64.powf(1.0 - t);
    let remainder = 3.0 * c * 4f64.powf(f64::from(last) * (1.0 - t)) / (1.0 - ratio);
    stragglers + blocks + remainder
}

fn lattice_bound(tau: &Parameter, t: f64, n: u64) -> f64 {
    let m = (4 * n).max(64);
    let band = band_sum(tau, t, n, m);
    let z = tau.tau();
    let mf = (m + 1) as f64;
    let r = (z + mf).norm().min((z * mf + 1.0).norm());
    let rho = (r / (r - 0.5)).powf(2.0 * t);
    // The cell b - [0,1) - [0,1)τ of each letter lies in the sector of angle arg τ
    // inside |z| ≤ |b|, so #{|b| ≤ r} ≤ arg(τ) r² / (2v).
    let far = rho * t * z.arg() / tau.v() * r.powf(2.0 - 2.0 * t) / (2.0 * t - 2.0);
    band + far
}

/// Both tail bounds; infinite for `t ≤ 1`, where the letter series diverges.
pub fn tail_bound(tau: &Parameter, t: f64, trunc: Truncation) -> TailBound {
    if t <= 1.0 {
        return TailBound {
            dyadic: f64::INFINITY,
            lattice: f64::INFINITY,
        };
    }
    let n = u64::from(trunc.get());
    TailBound {
        dyadic: dyadic_bound(tau, t, n),
        lattice: lattice_bound(tau, t, n),
    }
}

pub fn psi1_tail_bound(tau: &Parameter, t: f64, trunc: Truncation) -> f64 {
    tail_bound(tau, t, trunc).value()
}

/// Right-hand side of the dyadic block estimate for `Σ_b |b|^(-2t)` over the
/// whole alphabet.
pub fn dyadic_series_bound(tau: &Parameter, t: f64) -> f64 {
    if t <= 1.0 {
        return f64::INFINITY;
    }
    let tau2 = tau.tau().norm_sqr();
    let mut sum = 0.0;
    for p in 1..=200 {
        let scale = 4f64.powi(p - 1);
        sum += 3.0 * 4f64.powf(f64::from(p - 1) * (1.0 - t)) * (1.0 + tau2 / scale).min(tau2).powf(-t);
    }
    // Terms past p = 200 are at most 3·4^((p-1)(1-t)).
    sum + 3.0 * 4f64.powf(200.0 * (1.0 - t)) / (1.0 - 4f64.powf(1.0 - t))
}
