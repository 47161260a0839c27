use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Parameter, Truncation};
use crate::error::{Error, Result};

const SLACK: f64 = 1e-9;

/// One named inequality evaluated over samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryCheck {
    pub name: String,
    pub inequality: String,
    pub observed: f64,
    pub bound: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryReport {
    pub u: f64,
    pub v: f64,
    pub truncation: u32,
    pub samples: usize,
    pub seed: u64,
    pub checks: Vec<GeometryCheck>,
}

impl GeometryReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &GeometryCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Flat `key=value` lines, one per field.
    pub fn to_record(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "tau_u={}", self.u);
        let _ = writeln!(out, "tau_v={}", self.v);
        let _ = writeln!(out, "N={}", self.truncation);
        let _ = writeln!(out, "samples={}", self.samples);
        let _ = writeln!(out, "seed={}", self.seed);
        for c in &self.checks {
            let _ = writeln!(out, "{}.inequality={}", c.name, c.inequality);
            let _ = writeln!(out, "{}.observed={:.12e}", c.name, c.observed);
            let _ = writeln!(out, "{}.bound={:.12e}", c.name, c.bound);
            let _ = writeln!(out, "{}.passed={}", c.name, c.passed);
        }
        let _ = writeln!(out, "passed={}", self.passed());
        out
    }
}

fn check(name: &str, inequality: &str, observed: f64, bound: f64, passed: bool) -> GeometryCheck {
    GeometryCheck {
        name: name.to_string(),
        inequality: inequality.to_string(),
        observed,
        bound,
        passed,
    }
}

/// Uniform samples of the canonical disk; every other one sits on the boundary circle.
fn disk_samples(count: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..count)
        .map(|k| {
            let theta = rng.gen::<f64>() * std::f64::consts::TAU;
            let r = if k % 2 == 0 { 0.5 } else { 0.5 * rng.gen::<f64>().sqrt() };
            Complex64::new(0.5, 0.0) + Complex64::from_polar(r, theta)
        })
        .collect()
}

/// Evaluates the contraction, separation, and invariance inequalities of the
/// letter maps of `F(N)` on seeded samples of the canonical disk.
pub fn geometry_report(tau: &Parameter, trunc: Truncation, samples: usize, seed: u64) -> Result<GeometryReport> {
    if samples < 2 {
        return Err(Error::invalid("geometry checks need at least 2 samples"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zs = disk_samples(samples, &mut rng);
    let letters = trunc.values(tau);
    let center = Complex64::new(0.5, 0.0);

    let mut min_shift = f64::INFINITY;
    let mut max_lipschitz = 0.0f64;
    let mut max_escape = 0.0f64;
    for &b in &letters {
        for (k, &z) in zs.iter().enumerate() {
            let w = z + b;
            min_shift = min_shift.min(w.norm_sqr());
            let image = w.inv();
            max_escape = max_escape.max((image - center).norm());
            let z2 = zs[(k + 1) % zs.len()];
            let gap = (z - z2).norm();
            if gap > 0.0 {
                max_lipschitz = max_lipschitz.max((image - (z2 + b).inv()).norm() / gap);
            }
        }
    }

    // Distinct letters differ by dm + dn·τ with |dm|, |dn| < N, not both zero.
    let n = i64::from(trunc.get());
    let mut min_gap = f64::INFINITY;
    for dn in -(n - 1)..n {
        for dm in -(n - 1)..n {
            if dm != 0 || dn != 0 {
                min_gap = min_gap.min((Complex64::new(dm as f64, 0.0) + tau.tau() * dn as f64).norm());
            }
        }
    }
    if n == 1 {
        min_gap = f64::INFINITY;
    }

    let (c1, c2) = ratio_constants(tau);
    let (ratio_lo, ratio_hi) = sampled_ratios(tau, trunc, &zs, &mut rng);

    let checks = vec![
        check(
            "letter_distance",
            "min |z+b|^2 >= 5/4 - 1e-9",
            min_shift,
            1.25 - SLACK,
            min_shift >= 1.25 - SLACK,
        ),
        check(
            "contraction",
            "max |phi_b(z)-phi_b(z')|/|z-z'| <= 4/5 + 1e-9",
            max_lipschitz,
            0.8 + SLACK,
            max_lipschitz <= 0.8 + SLACK,
        ),
        check(
            "open_set_gap",
            "min |b-b'| >= 1 over distinct letters",
            min_gap,
            1.0,
            min_gap >= 1.0,
        ),
        check(
            "invariance",
            "max |phi_b(z)-1/2| <= 1/2 + 1e-9",
            max_escape,
            0.5 + SLACK,
            max_escape <= 0.5 + SLACK,
        ),
        check("ratio_lower", "min sampled ratio >= C1", ratio_lo, c1, ratio_lo >= c1),
        check("ratio_upper", "max sampled ratio <= C2", ratio_hi, c2, ratio_hi <= c2),
    ];

    Ok(GeometryReport {
        u: tau.u(),
        v: tau.v(),
        truncation: trunc.get(),
        samples,
        seed,
        checks,
    })
}

/// Runs [`geometry_report`] and turns the first failed inequality into an error.
pub fn verify_geometry(tau: &Parameter, trunc: Truncation, samples: usize, seed: u64) -> Result<GeometryReport> {
    let report = geometry_report(tau, trunc, samples, seed)?;
    if let Some(c) = report.failures().next() {
        return Err(Error::CheckFailed {
            check: c.name.clone(),
            detail: format!("{} (observed {:.6e}, bound {:.6e})", c.inequality, c.observed, c.bound),
        });
    }
    Ok(report)
}

/// Explicit constants `C1 ≤ |z'+m+nτ'|²/|z+m+nτ|² ≤ C2` valid for all
/// `z, z'` in the disk, all letters, and every `τ'` with `|u'-u| ≤ 1`, `|v'-v| ≤ v/3`.
pub fn ratio_constants(tau: &Parameter) -> (f64, f64) {
    let (u, v) = (tau.u(), tau.v());
    let spread = 2.0 + u.max(v);
    let c1 = 0.5 * (1.0 / spread).min(((2.0 / 3.0) * v - 0.5) / spread).powi(2);
    let head = (3.0 + u).powi(2);
    let c2 = head.max(head / (u * u + (v - 0.5).powi(2))) + (0.5 + (4.0 / 3.0) * v).powi(2) / (v - 0.5).powi(2);
    (c1, c2)
}

/// Extremes of the ratio over letters of `F(N)`, sample pairs, and perturbed
/// parameters drawn from the admissible neighborhood.
fn sampled_ratios(tau: &Parameter, trunc: Truncation, zs: &[Complex64], rng: &mut ChaCha8Rng) -> (f64, f64) {
    let (u, v) = (tau.u(), tau.v());
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    let perturbed: Vec<Complex64> = (0..8)
        .map(|k| {
            if k == 0 {
                return tau.tau();
            }
            let uk = rng.gen_range((u - 1.0).max(0.0)..=u + 1.0);
            let vk = rng.gen_range((2.0 * v / 3.0).max(1.0)..=4.0 * v / 3.0);
            Complex64::new(uk, vk)
        })
        .collect();
    for letter in trunc.letters() {
        let base = Complex64::new(letter.m as f64, 0.0);
        let b = base + tau.tau() * letter.n as f64;
        for tk in &perturbed {
            let bk = base + tk * letter.n as f64;
            for (k, &z) in zs.iter().enumerate().step_by(7) {
                let z2 = zs[(k * 31 + 3) % zs.len()];
                let r = (z2 + bk).norm_sqr() / (z + b).norm_sqr();
                lo = lo.min(r);
                hi = hi.max(r);
            }
        }
    }
    (lo, hi)
}
