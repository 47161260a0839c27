//! Parameter sweeps over rectangles in `A₀` and structural checks on them.

mod checks;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::{dimension_bracket, DimensionBracket, RungStore, SolverConfig};
use crate::system::Parameter;

pub use checks::{
    asymptotic_check, boundary_max_check, continuity_check, mean_value_entry, nonconstancy_check, subharmonic_check, AnalysisReport,
    CheckEntry, Outcome,
};

/// Closed rectangle `[u0, u1] × [v0, v1]` of parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub u0: f64,
    pub u1: f64,
    pub v0: f64,
    pub v1: f64,
}

impl Region {
    pub fn new(u0: f64, u1: f64, v0: f64, v1: f64) -> Result<Self> {
        if ![u0, u1, v0, v1].iter().all(|x| x.is_finite()) || u0 > u1 || v0 > v1 {
            return Err(Error::invalid(format!(
                "region needs u0 <= u1 and v0 <= v1, got {u0},{u1},{v0},{v1}"
            )));
        }
        Parameter::new(u0, v0)?;
        Ok(Region { u0, u1, v0, v1 })
    }

    /// Whether the rectangle reaches the edge `u = 0` or `v = 1` of `A₀`.
    pub fn touches_boundary(&self) -> bool {
        self.u0 == 0.0 || self.v0 == 1.0
    }

    /// Lattice coordinates along each axis, `u0 + k·step` up to the far edge.
    pub fn axes(&self, step: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::invalid(format!("step must be positive, got {step}")));
        }
        let axis = |a: f64, b: f64| -> Vec<f64> {
            let count = ((b - a) / step + 1e-9).floor() as usize + 1;
            (0..count).map(|k| a + k as f64 * step).collect()
        };
        Ok((axis(self.u0, self.u1), axis(self.v0, self.v1)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    /// Column index along `u`.
    pub i: usize,
    /// Row index along `v`.
    pub j: usize,
    pub bracket: DimensionBracket,
}

impl SweepCell {
    pub fn u(&self) -> f64 {
        self.bracket.u
    }

    pub fn v(&self) -> f64 {
        self.bracket.v
    }

    pub fn on_boundary(&self) -> bool {
        self.u() == 0.0 || self.v() == 1.0
    }
}

/// Brackets on a lattice, stored row by row (`v` outer, `u` inner).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub region: Region,
    pub step: f64,
    pub columns: usize,
    pub rows: usize,
    pub config: SolverConfig,
    pub cells: Vec<SweepCell>,
}

impl SweepGrid {
    pub fn cell(&self, i: usize, j: usize) -> &SweepCell {
        &self.cells[j * self.columns + i]
    }

    /// Pairs of horizontally or vertically adjacent cells.
    pub fn adjacent_pairs(&self) -> Vec<(&SweepCell, &SweepCell)> {
        let mut pairs = Vec::new();
        for j in 0..self.rows {
            for i in 0..self.columns {
                if i + 1 < self.columns {
                    pairs.push((self.cell(i, j), self.cell(i + 1, j)));
                }
                if j + 1 < self.rows {
                    pairs.push((self.cell(i, j), self.cell(i, j + 1)));
                }
            }
        }
        pairs
    }

    pub fn touches_boundary(&self) -> bool {
        self.region.touches_boundary()
    }

    /// Grid built from prescribed brackets, for exercising the checks.
    pub fn synthetic<F: Fn(f64, f64) -> (f64, f64)>(region: Region, step: f64, field: F) -> Result<Self> {
        let (us, vs) = region.axes(step)?;
        let cells = vs
            .iter()
            .enumerate()
            .flat_map(|(j, &v)| us.iter().enumerate().map(move |(i, &u)| (i, j, u, v)))
            .map(|(i, j, u, v)| {
                let (h_lo, h_hi) = field(u, v);
                SweepCell {
                    i,
                    j,
                    bracket: DimensionBracket {
                        h_lo,
                        h_hi,
                        u,
                        v,
                        ladder: vec![],
                        skipped: vec![],
                        converged: true,
                        degenerate: false,
                    },
                }
            })
            .collect();
        Ok(SweepGrid {
            region,
            step,
            columns: us.len(),
            rows: vs.len(),
            config: SolverConfig::default(),
            cells,
        })
    }
}

/// `dimension_bracket` at every lattice point of `region`.
///
/// Every cell is validated before any work starts. Cells run in parallel and
/// are stored in lattice order, so output does not depend on scheduling.
pub fn sweep_grid(region: &Region, step: f64, cfg: &SolverConfig, store: Option<&dyn RungStore>) -> Result<SweepGrid> {
    cfg.validate()?;
    let (us, vs) = region.axes(step)?;
    let sites: Vec<(usize, usize, Parameter)> = vs
        .iter()
        .enumerate()
        .flat_map(|(j, &v)| us.iter().enumerate().map(move |(i, &u)| (i, j, u, v)))
        .map(|(i, j, u, v)| Parameter::new(u, v).map(|p| (i, j, p)))
        .collect::<Result<_>>()?;
    let cells = sites
        .par_iter()
        .map(|&(i, j, tau)| dimension_bracket(&tau, cfg, store).map(|bracket| SweepCell { i, j, bracket }))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepGrid {
        region: *region,
        step,
        columns: us.len(),
        rows: vs.len(),
        config: cfg.clone(),
        cells,
    })
}
