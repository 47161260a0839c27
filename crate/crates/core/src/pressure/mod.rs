//! Two-sided bounds on `ψⁿ(t)` and the pressure `P(t) = lim (1/n) log ψⁿ(t)`.

mod tail;
mod theta;
mod words;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::NormDomain;
use crate::system::{letter_deriv_norm, DomainKind, Letter, Parameter, Truncation};

pub use tail::{block_size, dyadic_series_bound, psi1_tail_bound, tail_bound, TailBound};
pub use theta::{theta_diagnostic, ThetaBlock, ThetaReport};
pub use words::{LevelSums, WordEnumerator};

/// Default cap on the number of words visited in one pass.
pub const DEFAULT_WORD_BUDGET: u64 = 100_000_000;

/// Whether the bracket is for the full infinite system or only its finite core.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    /// All of `I_τ`: the tail beyond `F(N)` is bounded and added to the upper side.
    #[default]
    Full,
    /// Only the listed letters.
    Finite,
}

impl Scope {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scope::Full => "full",
            Scope::Finite => "finite",
        }
    }
}

impl std::str::FromStr for Scope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Scope::Full),
            "finite" => Ok(Scope::Finite),
            other => Err(Error::Parse(format!("unknown scope {other:?} (expected full or finite)"))),
        }
    }
}

/// Enclosure of `ψ¹(t)`; `upper` is infinite exactly when the tail diverges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub lower: f64,
    pub upper: f64,
    pub truncation: u32,
    pub t: f64,
}

/// Enclosure `P_lo ≤ P(t) ≤ P_hi` at one exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PressureBracket {
    pub t: f64,
    pub p_lo: f64,
    /// `+∞` when the tail bound diverges (serialized as `null` in JSON).
    pub p_hi: f64,
    pub level: usize,
    pub truncation: u32,
}

/// `(Σ sup^t, Σ inf^t)` over `F(N)` with norms taken on the canonical disk.
pub fn psi1_partial(tau: &Parameter, t: f64, trunc: Truncation) -> (f64, f64) {
    trunc.letters().fold((0.0, 0.0), |(s, i), l| {
        let d = letter_deriv_norm(l, tau);
        (s + d.sup_norm.powf(t), i + d.inf_norm.powf(t))
    })
}

/// `ψ¹(t)` enclosed by the inf-sum over `F(N)` and the sup-sum plus tail bound.
pub fn psi1_series(tau: &Parameter, t: f64, trunc: Truncation) -> SeriesValue {
    let (sup, inf) = psi1_partial(tau, t, trunc);
    SeriesValue {
        lower: inf,
        upper: sup + psi1_tail_bound(tau, t, trunc),
        truncation: trunc.get(),
        t,
    }
}

/// `(Σ_w inf^t, Σ_w sup^t)` over `F(N)ⁿ` on the canonical disk.
pub fn psi_n_bounds(tau: &Parameter, t: f64, trunc: Truncation, level: usize) -> Result<(f64, f64)> {
    let e = PressureEngine::new(tau, trunc, level, DomainKind::Disk, Scope::Full, DEFAULT_WORD_BUDGET)?;
    let s = e.enumerator.sums(&[t], &[t])?;
    let (lo, hi) = s.at(level);
    Ok((lo[0], hi[0]))
}

/// Pressure bracket of the full system with norms on the canonical disk.
pub fn pressure_bracket(tau: &Parameter, t: f64, trunc: Truncation, level: usize) -> Result<PressureBracket> {
    PressureEngine::new(tau, trunc, level, DomainKind::Disk, Scope::Full, DEFAULT_WORD_BUDGET)?.bracket(t)
}

/// Pressure brackets for one `(τ, N, n)` at many exponents.
#[derive(Debug, Clone)]
pub struct PressureEngine {
    tau: Parameter,
    truncation: Option<Truncation>,
    scope: Scope,
    enumerator: WordEnumerator,
}

impl PressureEngine {
    pub fn new(tau: &Parameter, trunc: Truncation, level: usize, domain: DomainKind, scope: Scope, budget: u64) -> Result<Self> {
        let enumerator = WordEnumerator::new(trunc.values(tau), domain.domain(tau), level, budget)?;
        Ok(PressureEngine {
            tau: *tau,
            truncation: Some(trunc),
            scope,
            enumerator,
        })
    }

    /// Engine for the finite subsystem on an explicit alphabet.
    pub fn subsystem(tau: &Parameter, letters: &[Letter], level: usize, domain: DomainKind, budget: u64) -> Result<Self> {
        let values = letters.iter().map(|l| l.value(tau)).collect();
        let enumerator = WordEnumerator::new(values, domain.domain(tau), level, budget)?;
        Ok(PressureEngine {
            tau: *tau,
            truncation: None,
            scope: Scope::Finite,
            enumerator,
        })
    }

    pub fn level(&self) -> usize {
        self.enumerator.level()
    }

    pub fn scope(&self) -> Scope {
        self.scope
    }

    pub fn domain(&self) -> &NormDomain {
        self.enumerator.domain()
    }

    pub fn word_count(&self) -> f64 {
        self.enumerator.word_count()
    }

    /// `P_lo` at each of `lower_ts` and `P_hi` at each of `upper_ts`, from one
    /// pass over the word tree.
    ///
    /// Every length `k ≤ n` yields a valid bound on its own, because inf-sums are
    /// supermultiplicative and sup-sums submultiplicative; the best one is kept.
    pub fn brackets(&self, lower_ts: &[f64], upper_ts: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let sums = self.enumerator.sums(lower_ts, upper_ts)?;
        let levels = self.level();
        let p_lo = (0..lower_ts.len())
            .map(|j| {
                (1..=levels)
                    .map(|k| sums.at(k).0[j].ln() / k as f64)
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
        let p_hi = upper_ts
            .iter()
            .enumerate()
            .map(|(j, &t)| {
                let core: Vec<f64> = (1..=levels).map(|k| sums.at(k).1[j]).collect();
                let tail = self.tail_bound(t);
                let a = self.letter_sup_sum(t);
                (1..=levels)
                    .map(|k| (core[k - 1] + tail_words(&core[..k - 1], a, tail, k)).ln() / k as f64)
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        Ok((p_lo, p_hi))
    }

    pub fn bracket(&self, t: f64) -> Result<PressureBracket> {
        let (lo, hi) = self.brackets(&[t], &[t])?;
        Ok(PressureBracket {
            t,
            p_lo: lo[0],
            p_hi: hi[0],
            level: self.level(),
            truncation: self.truncation.map_or(0, |tr| tr.get()),
        })
    }

    /// Per-letter sup-norm sum over the engine's domain.
    pub fn letter_sup_sum(&self, t: f64) -> f64 {
        let domain = self.enumerator.domain();
        self.enumerator
            .letters()
            .iter()
            .map(|&b| {
                let (near, _) = domain.min_max_distance(-b);
                near.powf(-2.0 * t)
            })
            .sum()
    }

    fn tail_bound(&self, t: f64) -> f64 {
        match (self.scope, self.truncation) {
            (Scope::Full, Some(trunc)) => psi1_tail_bound(&self.tau, t, trunc),
            _ => 0.0,
        }
    }
}

/// Bound on the sup-sum over length-`n` words with at least one letter outside
/// the alphabet. Splitting at the first such letter gives
/// `T · Σ_{k<n} ψ̄ᵏ_F (A+T)^(n-1-k)` with `ψ̄⁰ = 1`.
fn tail_words(core: &[f64], a: f64, tail: f64, n: usize) -> f64 {
    if tail == 0.0 {
        return 0.0;
    }
    if tail.is_infinite() {
        return f64::INFINITY;
    }
    let prefix = |k: usize| if k == 0 { 1.0 } else { core[k - 1] };
    tail * (0..n).map(|k| prefix(k) * (a + tail).powi((n - 1 - k) as i32)).sum::<f64>()
}
