use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::psi1_tail_bound;
use super::tail::{block_size, letter_sup_pow};
use crate::error::{Error, Result};
use crate::system::{Parameter, Truncation};

/// Exponent at which the finite tail is reported.
const TAIL_EXPONENT: f64 = 1.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaBlock {
    pub p: u32,
    pub size: u64,
    /// `Σ_{b ∈ K(p)} sup_X |φ_b'|`.
    pub increment: f64,
    /// `4^(p-1) (2^p (1+|τ|))^(-2)`, the guaranteed minimum of `increment`.
    pub lower_estimate: f64,
    /// `Σ_{b ∈ K'(p)} sup_X |φ_b'|`.
    pub partial_sum: f64,
}

/// Numerical evidence that the letter series diverges at `t = 1` and converges beyond.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaReport {
    pub blocks: Vec<ThetaBlock>,
    /// Least-squares slope of the partial sums against `p`.
    pub slope: f64,
    pub strictly_increasing: bool,
    pub increments_dominate: bool,
    pub tail_exponent: f64,
    /// Tail bound at `tail_exponent` past the last block.
    pub tail_bound: f64,
}

impl ThetaReport {
    pub fn passed(&self) -> bool {
        self.strictly_increasing && self.increments_dominate && self.slope > 0.0 && self.tail_bound.is_finite()
    }
}

pub fn theta_diagnostic(tau: &Parameter, p_max: u32) -> Result<ThetaReport> {
    if !(3..=20).contains(&p_max) {
        return Err(Error::invalid(format!("p_max must lie in 3..=20, got {p_max}")));
    }
    let z = tau.tau();
    let modulus = z.norm();
    let mut blocks = Vec::with_capacity(p_max as usize);
    let mut partial = 0.0;
    for p in 1..=p_max {
        let lo = 1u64 << (p - 1);
        let hi = (1u64 << p) - 1;
        let mut increment = 0.0;
        for k in lo..=hi {
            let kf = k as f64;
            for j in 1..=k {
                increment += letter_sup_pow(Complex64::new(kf, 0.0) + z * j as f64, 1.0);
            }
            for j in 1..lo {
                increment += letter_sup_pow(Complex64::new(j as f64, 0.0) + z * kf, 1.0);
            }
            for j in lo..k {
                increment += letter_sup_pow(Complex64::new(j as f64, 0.0) + z * kf, 1.0);
            }
        }
        partial += increment;
        blocks.push(ThetaBlock {
            p,
            size: block_size(p) as u64,
            increment,
            lower_estimate: 4f64.powi(p as i32 - 1) * (2f64.powi(p as i32) * (1.0 + modulus)).powi(-2),
            partial_sum: partial,
        });
    }
    let strictly_increasing = blocks.windows(2).all(|w| w[1].partial_sum > w[0].partial_sum);
    let increments_dominate = blocks.iter().all(|b| b.increment >= b.lower_estimate);
    let slope = least_squares_slope(&blocks);
    let trunc = Truncation::new((1u32 << p_max) - 1)?;
    Ok(ThetaReport {
        blocks,
        slope,
        strictly_increasing,
        increments_dominate,
        tail_exponent: TAIL_EXPONENT,
        tail_bound: psi1_tail_bound(tau, TAIL_EXPONENT, trunc),
    })
}

fn least_squares_slope(blocks: &[ThetaBlock]) -> f64 {
    let n = blocks.len() as f64;
    let mx = blocks.iter().map(|b| f64::from(b.p)).sum::<f64>() / n;
    let my = blocks.iter().map(|b| b.partial_sum).sum::<f64>() / n;
    let sxy: f64 = blocks.iter().map(|b| (f64::from(b.p) - mx) * (b.partial_sum - my)).sum();
    let sxx: f64 = blocks.iter().map(|b| (f64::from(b.p) - mx).powi(2)).sum();
    sxy / sxx
}
