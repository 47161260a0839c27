//! Point clouds approximating the limit set, the closure points `φ_w(0)`, and
//! a box-counting estimator.

mod boxcount;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::{Letter, Parameter, Truncation};

pub use boxcount::{box_counting_dim, BoxCountResult};

/// Seed point whose images approximate limit points.
pub const SEED_POINT: f64 = 0.5;

/// Random words are generated in independent seeded streams of this size.
const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    Random,
    Closure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloudMeta {
    pub u: f64,
    pub v: f64,
    pub truncation: u32,
    pub level: usize,
    pub mode: Mode,
    pub count: usize,
    pub seed: u64,
    /// Largest distance bound from a point to the limit point of its word.
    pub max_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    pub points: Vec<Complex64>,
    pub meta: CloudMeta,
}

/// `φ_w(z)` evaluated from the innermost letter outwards, together with the
/// product of the letters' sup-norms over the canonical disk.
fn image(word: &[Complex64], z: Complex64) -> (Complex64, f64) {
    word.iter().rev().fold((z, 1.0), |(z, lip), &b| {
        let r = (b + 0.5).norm() - 0.5;
        ((z + b).inv(), lip / (r * r))
    })
}

/// Images of the seed point under words of length `level` over `F(N)`.
///
/// Each output is within `sup_X |φ_w'| / 2 ≤ (4/5)^n / 2` of a true limit
/// point, since the limit point is `φ_w(y)` for some `y` in the disk.
pub fn generate_points(tau: &Parameter, trunc: Truncation, level: usize, mode: Mode, count: usize, seed: u64) -> Result<PointCloud> {
    if level == 0 {
        return Err(Error::invalid("word level must be at least 1"));
    }
    let letters = trunc.values(tau);
    let seed_point = Complex64::new(SEED_POINT, 0.0);
    let (points, max_lip): (Vec<Complex64>, f64) = match mode {
        Mode::Exhaustive => {
            let required = (letters.len() as f64).powi(level as i32);
            if required > count as f64 {
                return Err(Error::BudgetExceeded {
                    required,
                    budget: count as u64,
                });
            }
            let words = all_words(&letters, level);
            let evaluated: Vec<(Complex64, f64)> = words.par_iter().map(|w| image(w, seed_point)).collect();
            let max_lip = evaluated.iter().map(|p| p.1).fold(0.0, f64::max);
            (evaluated.into_iter().map(|p| p.0).collect(), max_lip)
        }
        Mode::Random => {
            let chunks = count.div_ceil(CHUNK);
            let parts: Vec<(Vec<Complex64>, f64)> = (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(c as u64);
                    let len = CHUNK.min(count - c * CHUNK);
                    let mut word = vec![Complex64::new(0.0, 0.0); level];
                    let mut out = Vec::with_capacity(len);
                    let mut max_lip = 0.0f64;
                    for _ in 0..len {
                        for slot in word.iter_mut() {
                            *slot = letters[rng.gen_range(0..letters.len())];
                        }
                        let (z, lip) = image(&word, seed_point);
                        out.push(z);
                        max_lip = max_lip.max(lip);
                    }
                    (out, max_lip)
                })
                .collect();
            let max_lip = parts.iter().map(|p| p.1).fold(0.0, f64::max);
            (parts.into_iter().flat_map(|p| p.0).collect(), max_lip)
        }
        Mode::Closure => return Err(Error::invalid("use closure_points for closure clouds")),
    };
    Ok(PointCloud {
        meta: CloudMeta {
            u: tau.u(),
            v: tau.v(),
            truncation: trunc.get(),
            level,
            mode,
            count: points.len(),
            seed,
            max_error: 0.5 * max_lip,
        },
        points,
    })
}

fn all_words(letters: &[Complex64], level: usize) -> Vec<Vec<Complex64>> {
    let mut words: Vec<Vec<Complex64>> = vec![vec![]];
    for _ in 0..level {
        words = words
            .iter()
            .flat_map(|w| {
                letters.iter().map(move |&b| {
                    let mut next = w.clone();
                    next.push(b);
                    next
                })
            })
            .collect();
    }
    words
}

/// Cap on the number of closure points generated in one call.
pub const CLOSURE_BUDGET: u64 = 10_000_000;

/// `{0} ∪ {φ_w(0) : 1 ≤ |w| ≤ max_len}` over `F(N)`, shortest words first.
pub fn closure_points(tau: &Parameter, trunc: Truncation, max_len: usize) -> Result<PointCloud> {
    let letters = trunc.values(tau);
    let required: f64 = 1.0 + (1..=max_len).map(|k| (letters.len() as f64).powi(k as i32)).sum::<f64>();
    if required > CLOSURE_BUDGET as f64 {
        return Err(Error::BudgetExceeded {
            required,
            budget: CLOSURE_BUDGET,
        });
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut points = vec![zero];
    // Words of length k+1 extend words of length k on the left: φ_b(φ_w(0)).
    let mut frontier = vec![zero];
    for _ in 0..max_len {
        frontier = frontier.iter().flat_map(|&z| letters.iter().map(move |&b| (z + b).inv())).collect();
        points.extend(&frontier);
    }
    Ok(PointCloud {
        meta: CloudMeta {
            u: tau.u(),
            v: tau.v(),
            truncation: trunc.get(),
            level: max_len,
            mode: Mode::Closure,
            count: points.len(),
            seed: 0,
            max_error: 0.0,
        },
        points,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EscapeRadius {
    pub truncation: u32,
    /// `max_{b ∉ F(N)} sup_X |φ_b| = 1/(|b + 1/2| - 1/2)`.
    pub s: f64,
    pub argmax: Letter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XInfinityReport {
    pub u: f64,
    pub v: f64,
    pub radii: Vec<EscapeRadius>,
    pub strictly_decreasing: bool,
}

impl XInfinityReport {
    pub fn passed(&self) -> bool {
        self.strictly_decreasing
    }
}

/// How far from 0 the images of letters outside `F(N)` can reach.
///
/// `|m + nτ + 1/2|` grows in both `m` and `n`, so the maximum over the
/// complement of `F(N)` sits at `(N+1, 1)` or `(1, N+1)`.
pub fn verify_x_infinity(tau: &Parameter, truncations: &[u32]) -> Result<XInfinityReport> {
    if truncations.is_empty() {
        return Err(Error::invalid("truncation list is empty"));
    }
    if truncations.windows(2).any(|w| w[0] >= w[1]) || truncations[0] == 0 {
        return Err(Error::invalid("truncations must be positive and increasing"));
    }
    let radii: Vec<EscapeRadius> = truncations
        .iter()
        .map(|&n| {
            let reach = |l: Letter| 1.0 / ((l.value(tau) + 0.5).norm() - 0.5);
            let candidates = [Letter { m: n + 1, n: 1 }, Letter { m: 1, n: n + 1 }];
            let (s, argmax) = candidates
                .iter()
                .map(|&l| (reach(l), l))
                .fold((0.0, candidates[0]), |best, c| if c.0 > best.0 { c } else { best });
            EscapeRadius { truncation: n, s, argmax }
        })
        .collect();
    let strictly_decreasing = radii.windows(2).all(|w| w[1].s < w[0].s);
    Ok(XInfinityReport {
        u: tau.u(),
        v: tau.v(),
        radii,
        strictly_decreasing,
    })
}
