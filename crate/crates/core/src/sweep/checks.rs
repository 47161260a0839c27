use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{SweepCell, SweepGrid};
use crate::error::{Error, Result};
use crate::pressure::psi1_series;
use crate::solver::{dimension_bracket, DimensionBracket, RungStore, SolverConfig};
use crate::system::{Parameter, Truncation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

/// One tested inequality `lhs <= rhs` (or `<`, as spelled in `inequality`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub label: String,
    pub inequality: String,
    pub lhs: f64,
    pub rhs: f64,
    /// Bracket width consumed on the right-hand side.
    pub slack: f64,
    pub outcome: Outcome,
}

impl CheckEntry {
    fn le(label: String, inequality: &str, lhs: f64, rhs: f64, slack: f64) -> Self {
        let outcome = if lhs <= rhs { Outcome::Pass } else { Outcome::Fail };
        CheckEntry {
            label,
            inequality: inequality.to_string(),
            lhs,
            rhs,
            slack,
            outcome,
        }
    }

    fn lt(label: String, inequality: &str, lhs: f64, rhs: f64) -> Self {
        let outcome = if lhs < rhs { Outcome::Pass } else { Outcome::Fail };
        CheckEntry {
            label,
            inequality: inequality.to_string(),
            lhs,
            rhs,
            slack: 0.0,
            outcome,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub check: String,
    pub outcome: Outcome,
    pub entries: Vec<CheckEntry>,
    pub summary: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl AnalysisReport {
    fn new(check: &str) -> Self {
        AnalysisReport {
            check: check.to_string(),
            outcome: Outcome::Pass,
            entries: vec![],
            summary: BTreeMap::new(),
            notes: vec![],
        }
    }

    /// Fail if any entry fails, else inconclusive if any entry is, else pass.
    fn settle(mut self) -> Self {
        self.outcome = if self.entries.iter().any(|e| e.outcome == Outcome::Fail) {
            Outcome::Fail
        } else if self.entries.iter().any(|e| e.outcome == Outcome::Inconclusive) {
            Outcome::Inconclusive
        } else {
            Outcome::Pass
        };
        self
    }

    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckEntry> {
        self.entries.iter().filter(|e| e.outcome == Outcome::Fail)
    }
}

fn site(b: &DimensionBracket) -> String {
    format!("{}+{}i", b.u, b.v)
}

fn pair_label(a: &DimensionBracket, b: &DimensionBracket) -> String {
    format!("{} ~ {}", site(a), site(b))
}

/// Adjacent midpoints may differ by at most `slack` plus both bracket widths.
pub fn continuity_check(grid: &SweepGrid, slack: f64) -> AnalysisReport {
    let mut report = AnalysisReport::new("continuity");
    let mut max_jump = 0.0f64;
    for (a, b) in grid.adjacent_pairs() {
        let (a, b) = (&a.bracket, &b.bracket);
        let jump = (a.midpoint() - b.midpoint()).abs();
        max_jump = max_jump.max(jump);
        let allowance = a.width() + b.width();
        report.entries.push(CheckEntry::le(
            pair_label(a, b),
            "|mid(a) - mid(b)| <= slack + width(a) + width(b)",
            jump,
            slack + allowance,
            allowance,
        ));
    }
    report.summary.insert("max_jump".into(), max_jump);
    report.summary.insert("slack".into(), slack);
    report.summary.insert("pairs".into(), report.entries.len() as f64);
    report.settle()
}

/// Positive when the two brackets are disjoint.
fn separation(a: &DimensionBracket, b: &DimensionBracket) -> f64 {
    (a.h_lo - b.h_hi).max(b.h_lo - a.h_hi)
}

fn intersect(a: &DimensionBracket, b: &DimensionBracket) -> DimensionBracket {
    DimensionBracket {
        h_lo: a.h_lo.max(b.h_lo),
        h_hi: a.h_hi.min(b.h_hi),
        ..b.clone()
    }
}

const SEPARATION: &str = "max(h_lo(a) - h_hi(b), h_lo(b) - h_hi(a)) > 0";

/// Looks for two adjacent cells whose brackets are disjoint, so `h` differs.
/// Without one the outcome is inconclusive.
///
/// Without a witness on the grid and with `refine` given, the `candidates`
/// pairs with the largest midpoint gap are recomputed under the finer config;
/// each refined bracket is intersected with the original one.
pub fn nonconstancy_check(
    grid: &SweepGrid,
    refine: Option<&SolverConfig>,
    candidates: usize,
    store: Option<&dyn RungStore>,
) -> Result<AnalysisReport> {
    let mut report = AnalysisReport::new("nonconstancy");
    let pairs = grid.adjacent_pairs();
    let mut best = f64::NEG_INFINITY;
    for (a, b) in &pairs {
        let gap = separation(&a.bracket, &b.bracket);
        best = best.max(gap);
        if gap > 0.0 {
            report
                .entries
                .push(CheckEntry::lt(pair_label(&a.bracket, &b.bracket), SEPARATION, 0.0, gap));
        }
    }
    if report.entries.is_empty() {
        if let Some(cfg) = refine {
            let mut ranked: Vec<&(&SweepCell, &SweepCell)> = pairs.iter().collect();
            ranked.sort_by(|x, y| {
                let gx = (x.0.bracket.midpoint() - x.1.bracket.midpoint()).abs();
                let gy = (y.0.bracket.midpoint() - y.1.bracket.midpoint()).abs();
                gy.total_cmp(&gx)
            });
            ranked.truncate(candidates);
            let mut cells: Vec<&SweepCell> = ranked.iter().flat_map(|p| [p.0, p.1]).collect();
            cells.sort_by_key(|c| (c.j, c.i));
            cells.dedup_by_key(|c| (c.j, c.i));
            let refined: HashMap<(usize, usize), DimensionBracket> = cells
                .iter()
                .map(|c| {
                    let tau = Parameter::new(c.u(), c.v())?;
                    Ok(((c.i, c.j), intersect(&c.bracket, &dimension_bracket(&tau, cfg, store)?)))
                })
                .collect::<Result<_>>()?;
            for (a, b) in ranked {
                let (ra, rb) = (&refined[&(a.i, a.j)], &refined[&(b.i, b.j)]);
                let gap = separation(ra, rb);
                best = best.max(gap);
                let mut entry = CheckEntry::lt(format!("{} (refined)", pair_label(ra, rb)), SEPARATION, 0.0, gap);
                if gap <= 0.0 {
                    entry.outcome = Outcome::Inconclusive;
                }
                report.entries.push(entry);
            }
            report.notes.push(format!(
                "no disjoint pair on the grid; refined the {candidates} pairs with the largest midpoint gap"
            ));
        }
    }
    report.summary.insert("best_separation".into(), best);
    let witnesses = report.entries.iter().filter(|e| e.outcome == Outcome::Pass).count();
    report.summary.insert("witnesses".into(), witnesses as f64);
    // Overlapping brackets are absence of evidence, not evidence of constancy.
    report.outcome = if witnesses > 0 { Outcome::Pass } else { Outcome::Inconclusive };
    Ok(report)
}

/// `mid(center) <= mean(mid(circle)) + width(center) + max width(circle)`.
pub fn mean_value_entry(center: &DimensionBracket, circle: &[DimensionBracket]) -> CheckEntry {
    let mean = circle.iter().map(|b| b.midpoint()).sum::<f64>() / circle.len() as f64;
    let allowance = center.width() + circle.iter().map(|b| b.width()).fold(0.0, f64::max);
    CheckEntry::le(
        format!("center {}", site(center)),
        "mid(center) <= mean(mid(circle)) + width(center) + max(width(circle))",
        center.midpoint(),
        mean + allowance,
        allowance,
    )
}

/// Sub-mean-value inequality on the circle of `k` points around `center`.
pub fn subharmonic_check(
    center: &Parameter,
    radius: f64,
    k: usize,
    cfg: &SolverConfig,
    store: Option<&dyn RungStore>,
) -> Result<AnalysisReport> {
    if k < 8 || !(radius > 0.0) {
        return Err(Error::invalid(format!(
            "need k >= 8 and radius > 0, got k = {k}, radius = {radius}"
        )));
    }
    if !(center.u() - radius > 0.0 && center.v() - radius > 1.0) {
        return Err(Error::OutOfDomain {
            u: center.u() - radius,
            v: center.v() - radius,
        });
    }
    let mut sites = vec![*center];
    for j in 0..k {
        let z = center.tau() + Complex64::from_polar(radius, std::f64::consts::TAU * j as f64 / k as f64);
        sites.push(Parameter::from_complex(z)?);
    }
    let brackets = sites
        .par_iter()
        .map(|tau| dimension_bracket(tau, cfg, store))
        .collect::<Result<Vec<_>>>()?;
    let mut report = AnalysisReport::new("subharmonic");
    let entry = mean_value_entry(&brackets[0], &brackets[1..]);
    report.summary.insert("center_mid".into(), brackets[0].midpoint());
    report.summary.insert("center_width".into(), brackets[0].width());
    report.summary.insert("circle_mean".into(), entry.rhs - entry.slack);
    report.summary.insert("radius".into(), radius);
    report.entries.push(entry);
    Ok(report.settle())
}

/// Where the largest midpoint sits relative to the edges `u = 0` and `v = 1`.
///
/// An interior argmax is a failure only when its lower end beats the upper
/// end of every boundary cell; otherwise it is inconclusive.
pub fn boundary_max_check(grid: &SweepGrid) -> Result<AnalysisReport> {
    if !grid.touches_boundary() || grid.cells.is_empty() {
        return Err(Error::invalid("grid does not touch u = 0 or v = 1"));
    }
    let by_mid = |a: &&SweepCell, b: &&SweepCell| a.bracket.midpoint().total_cmp(&b.bracket.midpoint());
    let argmax = grid.cells.iter().max_by(by_mid).expect("nonempty grid");
    let best_boundary = grid
        .cells
        .iter()
        .filter(|c| c.on_boundary())
        .max_by(by_mid)
        .expect("grid touches the boundary");
    let best_interior = grid.cells.iter().filter(|c| !c.on_boundary()).max_by(by_mid);
    let boundary_hi = grid
        .cells
        .iter()
        .filter(|c| c.on_boundary())
        .map(|c| c.bracket.h_hi)
        .fold(f64::NEG_INFINITY, f64::max);

    let mut report = AnalysisReport::new("boundary_max");
    let b = &argmax.bracket;
    report.summary.insert("argmax_u".into(), b.u);
    report.summary.insert("argmax_v".into(), b.v);
    report.summary.insert("argmax_mid".into(), b.midpoint());
    report.summary.insert("boundary_best_mid".into(), best_boundary.bracket.midpoint());
    if let Some(c) = best_interior {
        report.summary.insert("interior_best_mid".into(), c.bracket.midpoint());
    }
    if argmax.on_boundary() {
        let mut entry = CheckEntry::le(
            format!("argmax {}", site(b)),
            "min(u, v - 1) <= 0 at the argmax cell",
            b.u.min(b.v - 1.0),
            0.0,
            0.0,
        );
        entry.outcome = Outcome::Pass;
        report.entries.push(entry);
    } else {
        let mut entry = CheckEntry::le(
            format!("interior argmax {}", site(b)),
            "h_lo(argmax) <= max(h_hi(boundary cells))",
            b.h_lo,
            boundary_hi,
            boundary_hi - best_boundary.bracket.midpoint(),
        );
        if entry.outcome == Outcome::Pass {
            entry.outcome = Outcome::Inconclusive;
            report
                .notes
                .push("interior midpoint is largest but its bracket overlaps a boundary bracket; refine".into());
        }
        report.entries.push(entry);
    }
    Ok(report.settle())
}

/// Behaviour of `h` along the ray `direction · r` for increasing `r`.
pub fn asymptotic_check(
    direction: Complex64,
    magnitudes: &[f64],
    cfg: &SolverConfig,
    eps: f64,
    store: Option<&dyn RungStore>,
) -> Result<AnalysisReport> {
    if magnitudes.is_empty() || magnitudes.windows(2).any(|w| !(w[0] < w[1])) || !(magnitudes[0] > 0.0) {
        return Err(Error::invalid("magnitudes must be positive and strictly increasing"));
    }
    if !(direction.norm() > 0.0) || !(eps > 0.0) {
        return Err(Error::invalid("direction must be nonzero and eps positive"));
    }
    cfg.validate()?;
    let unit = direction / direction.norm();
    let sites = magnitudes
        .iter()
        .map(|&r| Parameter::from_complex(unit * r))
        .collect::<Result<Vec<_>>>()?;
    let brackets = sites
        .par_iter()
        .map(|tau| dimension_bracket(tau, cfg, store))
        .collect::<Result<Vec<_>>>()?;
    let trunc = Truncation::new(*cfg.truncations.last().expect("validated schedule"))?;
    let t = 1.0 + eps;
    let psi: Vec<f64> = sites.iter().map(|tau| psi1_series(tau, t, trunc).upper).collect();

    let mut report = AnalysisReport::new("asymptotic");
    for (k, w) in brackets.windows(2).enumerate() {
        let allowance = w[0].width() + w[1].width();
        report.entries.push(CheckEntry::le(
            format!("r = {} -> {}", magnitudes[k], magnitudes[k + 1]),
            "h_hi(next) <= h_hi(prev) + width(prev) + width(next)",
            w[1].h_hi,
            w[0].h_hi + allowance,
            allowance,
        ));
    }
    let last = brackets.last().expect("nonempty");
    report.entries.push(CheckEntry::le(
        format!("r = {}", magnitudes[magnitudes.len() - 1]),
        "h_hi <= 1 + eps",
        last.h_hi,
        t,
        0.0,
    ));
    for (k, w) in psi.windows(2).enumerate() {
        report.entries.push(CheckEntry::lt(
            format!("psi1 r = {} -> {}", magnitudes[k], magnitudes[k + 1]),
            "psi1_upper(1 + eps, next) < psi1_upper(1 + eps, prev)",
            w[1],
            w[0],
        ));
    }
    report.entries.push(CheckEntry::lt(
        format!("psi1 r = {}", magnitudes[magnitudes.len() - 1]),
        "psi1_upper(1 + eps) < 1",
        psi[psi.len() - 1],
        1.0,
    ));
    for (k, (b, p)) in brackets.iter().zip(&psi).enumerate() {
        report.summary.insert(format!("h_hi[{k}]"), b.h_hi);
        report.summary.insert(format!("h_lo[{k}]"), b.h_lo);
        report.summary.insert(format!("psi1_upper[{k}]"), *p);
    }
    report.summary.insert("eps".into(), eps);
    Ok(report.settle())
}
