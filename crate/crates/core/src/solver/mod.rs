//! Certified brackets `h_lo ≤ h ≤ h_hi` for the zero of the pressure function.

mod bisect;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pressure::{PressureEngine, Scope, DEFAULT_WORD_BUDGET};
use crate::system::{DomainKind, Letter, Parameter, Truncation};

pub use bisect::{bisect_zero, Enclosure};

/// Tag folded into cache keys; bump whenever numerical output can change.
pub const CODE_VERSION: &str = concat!("gccf-", env!("CARGO_PKG_VERSION"), "-r1");

/// Left end of the search interval for the full system, which has `h > 1`.
pub const FULL_T_MIN: f64 = 1.0 + 1e-6;
/// Every system in the family has `h < 2`.
pub const T_MAX: f64 = 2.0;

/// Interior points added per active interval on each pass over the word tree.
const SPLITS: usize = 9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Alphabet cutoffs `N`, nondecreasing.
    pub truncations: Vec<u32>,
    /// Word lengths `n`, nondecreasing.
    pub levels: Vec<usize>,
    pub tol: f64,
    pub budget: u64,
    pub target_width: f64,
    pub domain: DomainKind,
    pub scope: Scope,
    /// How many times `N` may double when `P_hi(2) ≥ 0`.
    pub max_escalations: u32,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            truncations: vec![10, 20, 40],
            levels: vec![1, 2, 3],
            tol: 1e-3,
            budget: DEFAULT_WORD_BUDGET,
            target_width: 0.05,
            domain: DomainKind::Lens,
            scope: Scope::Full,
            max_escalations: 3,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.truncations.is_empty() || self.levels.is_empty() {
            return Err(Error::invalid("solver schedules must be nonempty"));
        }
        if self.truncations.windows(2).any(|w| w[0] > w[1]) || self.levels.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("solver schedules must be nondecreasing"));
        }
        if self.truncations.contains(&0) || self.levels.contains(&0) {
            return Err(Error::invalid("N and n must be at least 1"));
        }
        if !(self.tol > 0.0) || !(self.target_width > 0.0) || self.budget == 0 {
            return Err(Error::invalid("tolerance, target width and budget must be positive"));
        }
        Ok(())
    }

    fn search_interval(&self) -> (f64, f64) {
        match self.scope {
            Scope::Full => (FULL_T_MIN, T_MAX),
            Scope::Finite => (0.0, T_MAX),
        }
    }

    /// Value reported for `h_lo` when `P_lo` is not positive at the left end.
    fn floor(&self) -> f64 {
        match self.scope {
            Scope::Full => 1.0,
            Scope::Finite => 0.0,
        }
    }
}

/// One `(N, n)` step of the refinement ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rung {
    /// Cutoff `N` actually used (after any escalation); 0 for explicit alphabets.
    pub truncation: u32,
    pub level: usize,
    pub letters: usize,
    pub h_lo: f64,
    pub h_hi: f64,
    pub t_evals: u32,
    pub passes: u32,
    pub seconds: f64,
    /// `P_lo` was not positive at the left end, so `h_lo` is the theoretical floor.
    pub lower_from_theory: bool,
    /// `P_hi(2)` was not negative, so `h_hi = 2` comes from theory alone.
    pub upper_from_theory: bool,
    /// Requested `N` when escalation replaced it.
    pub escalated_from: Option<u32>,
    #[serde(skip)]
    pub cached: bool,
}

impl Rung {
    pub fn width(&self) -> f64 {
        self.h_hi - self.h_lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.h_lo + self.h_hi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedRung {
    pub truncation: u32,
    pub level: usize,
    pub required_words: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionBracket {
    pub h_lo: f64,
    pub h_hi: f64,
    pub u: f64,
    pub v: f64,
    pub ladder: Vec<Rung>,
    pub skipped: Vec<SkippedRung>,
    pub converged: bool,
    /// Fewer than two letters, so the limit set is at most a point.
    pub degenerate: bool,
}

impl DimensionBracket {
    pub fn width(&self) -> f64 {
        self.h_hi - self.h_lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.h_lo + self.h_hi)
    }

    pub fn cache_hits(&self) -> usize {
        self.ladder.iter().filter(|r| r.cached).count()
    }

    fn from_ladder(tau: &Parameter, ladder: Vec<Rung>, skipped: Vec<SkippedRung>, target_width: f64, degenerate: bool) -> Self {
        let h_lo = ladder.iter().map(|r| r.h_lo).fold(f64::NEG_INFINITY, f64::max);
        let h_hi = ladder.iter().map(|r| r.h_hi).fold(f64::INFINITY, f64::min);
        DimensionBracket {
            h_lo,
            h_hi,
            u: tau.u(),
            v: tau.v(),
            converged: h_hi - h_lo <= target_width,
            ladder,
            skipped,
            degenerate,
        }
    }
}

/// Exact-match identity of a cached rung.
#[derive(Debug, Clone, PartialEq)]
pub struct RungKey {
    pub u: f64,
    pub v: f64,
    pub truncation: u32,
    pub level: usize,
    pub tol: f64,
    pub domain: DomainKind,
    pub scope: Scope,
    pub budget: u64,
}

impl RungKey {
    /// Canonical decimal rendering; `{:?}` on `f64` round-trips exactly.
    pub fn canonical(&self) -> String {
        format!(
            "u={:?};v={:?};N={};n={};tol={:?};domain={};scope={};budget={};code={}",
            self.u,
            self.v,
            self.truncation,
            self.level,
            self.tol,
            self.domain.as_str(),
            self.scope.as_str(),
            self.budget,
            CODE_VERSION
        )
    }
}

/// Persistent store of finished rungs.
pub trait RungStore: Sync {
    fn get(&self, key: &RungKey) -> Option<Rung>;
    fn put(&self, key: &RungKey, rung: &Rung) -> Result<()>;
}

fn interior(a: f64, b: f64) -> Vec<f64> {
    (1..=SPLITS).map(|k| a + (b - a) * k as f64 / (SPLITS + 1) as f64).collect()
}

struct RungOutcome {
    h_lo: f64,
    h_hi: Option<f64>,
    lower_from_theory: bool,
    t_evals: u32,
    passes: u32,
}

/// Joint search for the zeros of `P_lo` and `P_hi` on a fixed grid of
/// `SPLITS + 1` subdivisions, so rungs whose zeros are ordered report ordered
/// endpoints. The first pass also checks the signs at the interval ends.
fn solve_rung(engine: &PressureEngine, t_min: f64, t_max: f64, tol: f64, floor: f64) -> Result<RungOutcome> {
    let mut lo = (t_min, t_max);
    let mut hi = (t_min, t_max);
    let mut lower_active = true;
    let mut upper_active = true;
    let mut first = true;
    let mut lower_from_theory = false;
    let mut t_evals = 0;
    let mut passes = 0;
    loop {
        lower_active &= lo.1 - lo.0 > tol;
        upper_active &= hi.1 - hi.0 > tol;
        if !lower_active && !upper_active {
            break;
        }
        let mut ts_lo = if lower_active { interior(lo.0, lo.1) } else { vec![] };
        let mut ts_hi = if upper_active { interior(hi.0, hi.1) } else { vec![] };
        if first {
            ts_lo.insert(0, t_min);
            ts_hi.push(t_max);
        }
        let (mut p_lo, mut p_hi) = engine.brackets(&ts_lo, &ts_hi)?;
        t_evals += (ts_lo.len() + ts_hi.len()) as u32;
        passes += 1;
        if first {
            first = false;
            if !(p_hi.pop().is_some_and(|p| p < 0.0)) {
                return Ok(RungOutcome {
                    h_lo: floor,
                    h_hi: None,
                    lower_from_theory: true,
                    t_evals,
                    passes,
                });
            }
            if !(p_lo.remove(0) > 0.0) {
                lower_from_theory = true;
                lower_active = false;
                p_lo.clear();
            }
        }
        if lower_active {
            // P_lo is decreasing: keep the last grid point where it is still positive.
            let k = p_lo.iter().take_while(|&&p| p > 0.0).count();
            lo = narrow(lo, k);
        }
        if upper_active {
            // Keep the first grid point where P_hi is certified negative.
            let k = p_hi.iter().take_while(|&&p| !(p < 0.0)).count();
            hi = narrow(hi, k);
        }
    }
    Ok(RungOutcome {
        h_lo: if lower_from_theory { floor } else { lo.0 },
        h_hi: Some(hi.1),
        lower_from_theory,
        t_evals,
        passes,
    })
}

/// Subinterval `k` of the `SPLITS + 1` equal pieces of `(a, b)`.
fn narrow((a, b): (f64, f64), k: usize) -> (f64, f64) {
    let mut grid = vec![a];
    grid.extend(interior(a, b));
    grid.push(b);
    (grid[k], grid[k + 1])
}

fn word_count(letters: u64, level: usize) -> f64 {
    (letters as f64).powi(level as i32)
}

fn compute_rung(tau: &Parameter, n_trunc: u32, level: usize, cfg: &SolverConfig) -> Result<Rung> {
    let start = Instant::now();
    let (t_min, t_max) = cfg.search_interval();
    let mut current = n_trunc;
    let mut escalations = 0;
    loop {
        let trunc = Truncation::new(current)?;
        let engine = PressureEngine::new(tau, trunc, level, cfg.domain, cfg.scope, cfg.budget)?;
        let out = solve_rung(&engine, t_min, t_max, cfg.tol, cfg.floor())?;
        let next = current.saturating_mul(2);
        let can_escalate = escalations < cfg.max_escalations && word_count(u64::from(next) * u64::from(next), level) <= cfg.budget as f64;
        if out.h_hi.is_none() && can_escalate {
            current = next;
            escalations += 1;
            continue;
        }
        return Ok(Rung {
            truncation: current,
            level,
            letters: trunc.letter_count() as usize,
            h_lo: out.h_lo,
            h_hi: out.h_hi.unwrap_or(t_max),
            t_evals: out.t_evals,
            passes: out.passes,
            seconds: start.elapsed().as_secs_f64(),
            lower_from_theory: out.lower_from_theory,
            upper_from_theory: out.h_hi.is_none(),
            escalated_from: (current != n_trunc).then_some(n_trunc),
            cached: false,
        });
    }
}

/// Every rung of the `(N, n)` schedule within budget, in schedule order.
pub fn refine_ladder(tau: &Parameter, cfg: &SolverConfig, store: Option<&dyn RungStore>) -> Result<(Vec<Rung>, Vec<SkippedRung>)> {
    cfg.validate()?;
    let mut ladder = Vec::new();
    let mut skipped = Vec::new();
    for &n_trunc in &cfg.truncations {
        for &level in &cfg.levels {
            let required = word_count(u64::from(n_trunc) * u64::from(n_trunc), level);
            if required > cfg.budget as f64 {
                skipped.push(SkippedRung {
                    truncation: n_trunc,
                    level,
                    required_words: required,
                });
                continue;
            }
            let key = RungKey {
                u: tau.u(),
                v: tau.v(),
                truncation: n_trunc,
                level,
                tol: cfg.tol,
                domain: cfg.domain,
                scope: cfg.scope,
                budget: cfg.budget,
            };
            if let Some(mut rung) = store.and_then(|s| s.get(&key)) {
                rung.cached = true;
                ladder.push(rung);
                continue;
            }
            let rung = compute_rung(tau, n_trunc, level, cfg)?;
            if let Some(s) = store {
                s.put(&key, &rung)?;
            }
            ladder.push(rung);
        }
    }
    if ladder.is_empty() {
        let required = skipped.iter().map(|s| s.required_words).fold(f64::INFINITY, f64::min);
        return Err(Error::BudgetExceeded {
            required,
            budget: cfg.budget,
        });
    }
    Ok((ladder, skipped))
}

/// Intersection of all ladder rungs, flagged converged when within the target width.
pub fn dimension_bracket(tau: &Parameter, cfg: &SolverConfig, store: Option<&dyn RungStore>) -> Result<DimensionBracket> {
    let (ladder, skipped) = refine_ladder(tau, cfg, store)?;
    Ok(DimensionBracket::from_ladder(tau, ladder, skipped, cfg.target_width, false))
}

/// Bracket for the finite subsystem on an explicit alphabet at one word level.
pub fn subsystem_bracket(tau: &Parameter, letters: &[Letter], level: usize, cfg: &SolverConfig) -> Result<DimensionBracket> {
    if letters.is_empty() {
        return Err(Error::invalid("subsystem alphabet is empty"));
    }
    let start = Instant::now();
    let engine = PressureEngine::subsystem(tau, letters, level, cfg.domain, cfg.budget)?;
    let out = solve_rung(&engine, 0.0, T_MAX, cfg.tol, 0.0)?;
    let rung = Rung {
        truncation: 0,
        level,
        letters: letters.len(),
        h_lo: out.h_lo,
        h_hi: out.h_hi.unwrap_or(T_MAX),
        t_evals: out.t_evals,
        passes: out.passes,
        seconds: start.elapsed().as_secs_f64(),
        lower_from_theory: out.lower_from_theory,
        upper_from_theory: out.h_hi.is_none(),
        escalated_from: None,
        cached: false,
    };
    Ok(DimensionBracket::from_ladder(
        tau,
        vec![rung],
        vec![],
        cfg.target_width,
        letters.len() < 2,
    ))
}
