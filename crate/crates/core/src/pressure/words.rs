use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{MobiusMap, NormDomain};

/// Two-sided sums of `|φ_w'|^t` over all words of each length `1..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSums {
    /// `lower[k-1][j] = Σ_{|w|=k} (inf |φ_w'|)^t_j` over the requested lower exponents.
    pub lower: Vec<Vec<f64>>,
    /// `upper[k-1][j] = Σ_{|w|=k} (sup |φ_w'|)^t_j` over the requested upper exponents.
    pub upper: Vec<Vec<f64>>,
}

impl LevelSums {
    fn zeros(levels: usize, lower: usize, upper: usize) -> Self {
        LevelSums {
            lower: vec![vec![0.0; lower]; levels],
            upper: vec![vec![0.0; upper]; levels],
        }
    }

    fn add(&mut self, other: &LevelSums) {
        for (a, b) in self.lower.iter_mut().flatten().zip(other.lower.iter().flatten()) {
            *a += b;
        }
        for (a, b) in self.upper.iter_mut().flatten().zip(other.upper.iter().flatten()) {
            *a += b;
        }
    }

    /// Sums over words of exactly length `k`.
    pub fn at(&self, k: usize) -> (&[f64], &[f64]) {
        (&self.lower[k - 1], &self.upper[k - 1])
    }
}

/// Depth-first enumerator of `F^k` for `k = 1..=n` over a finite letter list.
///
/// Words are never materialized: each prefix carries its composed matrix and
/// the last letter is folded in analytically, since appending `φ_b` to a prefix
/// with bottom row `(C, D)` yields the pole `-C/D - b` and the factor `|det|/|D|²`.
#[derive(Debug, Clone)]
pub struct WordEnumerator {
    letters: Vec<Complex64>,
    domain: NormDomain,
    level: usize,
}

impl WordEnumerator {
    pub fn new(letters: Vec<Complex64>, domain: NormDomain, level: usize, budget: u64) -> Result<Self> {
        if level == 0 {
            return Err(Error::invalid("word level must be at least 1"));
        }
        if letters.is_empty() {
            return Err(Error::invalid("alphabet is empty"));
        }
        let required = word_count(letters.len(), level);
        if required > budget as f64 {
            return Err(Error::BudgetExceeded { required, budget });
        }
        Ok(WordEnumerator { letters, domain, level })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn letters(&self) -> &[Complex64] {
        &self.letters
    }

    pub fn domain(&self) -> &NormDomain {
        &self.domain
    }

    pub fn word_count(&self) -> f64 {
        word_count(self.letters.len(), self.level)
    }

    /// Evaluates the lower sums at each of `lower_ts` and the upper sums at each
    /// of `upper_ts`, for every word length up to the level, in one pass.
    pub fn sums(&self, lower_ts: &[f64], upper_ts: &[f64]) -> Result<LevelSums> {
        let zeros = || LevelSums::zeros(self.level, lower_ts.len(), upper_ts.len());
        let mut total = zeros();
        self.leaves(&MobiusMap::identity(), 0, lower_ts, upper_ts, &mut total)?;
        if self.level == 1 {
            return Ok(total);
        }
        let parts: Vec<LevelSums> = self
            .letters
            .par_iter()
            .map(|&b| {
                let mut acc = zeros();
                self.walk(&MobiusMap::letter(b), 1, lower_ts, upper_ts, &mut acc)?;
                Ok(acc)
            })
            .collect::<Result<_>>()?;
        // Fixed letter order keeps the floating-point result reproducible.
        for part in &parts {
            total.add(part);
        }
        Ok(total)
    }

    fn walk(&self, prefix: &MobiusMap, depth: usize, lower_ts: &[f64], upper_ts: &[f64], acc: &mut LevelSums) -> Result<()> {
        self.leaves(prefix, depth, lower_ts, upper_ts, acc)?;
        if depth + 1 < self.level {
            for &b in &self.letters {
                let next = prefix.compose(&MobiusMap::letter(b))?;
                self.walk(&next, depth + 1, lower_ts, upper_ts, acc)?;
            }
        }
        Ok(())
    }

    /// Adds every one-letter extension of `prefix` (of length `depth`) to the
    /// sums for length `depth + 1`.
    fn leaves(&self, prefix: &MobiusMap, depth: usize, lower_ts: &[f64], upper_ts: &[f64], acc: &mut LevelSums) -> Result<()> {
        let [_, _, c, d] = prefix.entries();
        if d.norm() == 0.0 {
            return self.leaves_by_matrix(prefix, depth, lower_ts, upper_ts, acc);
        }
        let lower = &mut acc.lower[depth];
        let upper = &mut acc.upper[depth];
        let (lower_plan, upper_plan) = (Powers::plan(lower_ts), Powers::plan(upper_ts));
        let shift = -c / d;
        let ln_weight = prefix.determinant().norm().ln() - 2.0 * d.norm().ln();
        for &b in &self.letters {
            let pole = shift - b;
            let (near, far) = self.domain.min_max_distance(pole);
            if !(near > 0.0) {
                return Err(Error::PoleInDomain { pole });
            }
            lower_plan.accumulate(ln_weight - 2.0 * far.ln(), lower);
            upper_plan.accumulate(ln_weight - 2.0 * near.ln(), upper);
        }
        Ok(())
    }

    fn leaves_by_matrix(&self, prefix: &MobiusMap, depth: usize, lower_ts: &[f64], upper_ts: &[f64], acc: &mut LevelSums) -> Result<()> {
        for &b in &self.letters {
            let bounds = prefix.compose(&MobiusMap::letter(b))?.deriv_bounds(&self.domain)?;
            for (s, &t) in acc.lower[depth].iter_mut().zip(lower_ts) {
                *s += bounds.inf_norm.powf(t);
            }
            for (s, &t) in acc.upper[depth].iter_mut().zip(upper_ts) {
                *s += bounds.sup_norm.powf(t);
            }
        }
        Ok(())
    }
}

/// Evaluation plan for `x^t` over a list of exponents given `ln x`.
///
/// Evenly spaced exponents, which is what the solver requests, become a
/// geometric progression: two `exp` calls and one multiply per exponent.
enum Powers<'a> {
    Empty,
    Progression { start: f64, step: f64, count: usize },
    General(&'a [f64]),
}

impl<'a> Powers<'a> {
    fn plan(ts: &'a [f64]) -> Self {
        match ts {
            [] => Powers::Empty,
            [t] => Powers::Progression {
                start: *t,
                step: 0.0,
                count: 1,
            },
            [first, second, ..] => {
                let step = second - first;
                let even = ts.windows(2).all(|w| ((w[1] - w[0]) - step).abs() <= 1e-12 * step.abs().max(1.0));
                if even {
                    Powers::Progression {
                        start: *first,
                        step,
                        count: ts.len(),
                    }
                } else {
                    Powers::General(ts)
                }
            }
        }
    }

    #[inline]
    fn accumulate(&self, ln_x: f64, sums: &mut [f64]) {
        match *self {
            Powers::Empty => {}
            Powers::Progression { start, step, count } => {
                let mut value = (start * ln_x).exp();
                let ratio = (step * ln_x).exp();
                for s in &mut sums[..count] {
                    *s += value;
                    value *= ratio;
                }
            }
            Powers::General(ts) => {
                for (s, &t) in sums.iter_mut().zip(ts) {
                    *s += (t * ln_x).exp();
                }
            }
        }
    }
}

pub(crate) fn word_count(letters: usize, level: usize) -> f64 {
    (letters as f64).powi(level as i32)
}
