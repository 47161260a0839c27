use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::limitset::{BoxCountResult, PointCloud};
use crate::pressure::PressureBracket;
use crate::solver::{DimensionBracket, CODE_VERSION};
use crate::sweep::SweepGrid;

/// A JSON document pairing a result with the configuration that produced it.
#[derive(Debug, Serialize)]
pub struct Artifact<'a, C: Serialize, T: Serialize> {
    pub code_version: &'static str,
    pub config: &'a C,
    pub result: &'a T,
}

impl<'a, C: Serialize, T: Serialize> Artifact<'a, C, T> {
    pub fn new(config: &'a C, result: &'a T) -> Self {
        Artifact {
            code_version: CODE_VERSION,
            config,
            result,
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Leading comment line carrying the config and code version.
fn preamble(config: &Value, header: &str) -> String {
    let mut echo = serde_json::Map::new();
    echo.insert("code_version".into(), Value::from(CODE_VERSION));
    echo.insert("config".into(), config.clone());
    format!("# config: {}\n{header}\n", Value::Object(echo))
}

pub fn cloud_csv(cloud: &PointCloud) -> Result<String> {
    let mut s = preamble(&serde_json::to_value(&cloud.meta)?, "re,im");
    for z in &cloud.points {
        writeln!(s, "{},{}", z.re, z.im).expect("writing to a String");
    }
    Ok(s)
}

pub fn ladder_csv(bracket: &DimensionBracket, config: &Value) -> String {
    let mut s = preamble(config, "u,v,N,n,t_evals,h_lo,h_hi,seconds");
    for r in &bracket.ladder {
        writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            bracket.u, bracket.v, r.truncation, r.level, r.t_evals, r.h_lo, r.h_hi, r.seconds
        )
        .expect("writing to a String");
    }
    s
}

/// One row per cell; `N` and `n` are those of the last ladder rung.
pub fn grid_csv(grid: &SweepGrid) -> Result<String> {
    let config = serde_json::json!({"region": grid.region, "step": grid.step, "solver": grid.config});
    let mut s = preamble(&config, "u,v,h_lo,h_hi,N,n,seconds");
    for c in &grid.cells {
        let b = &c.bracket;
        let (n_trunc, level) = b.ladder.last().map_or((0, 0), |r| (r.truncation, r.level));
        let seconds: f64 = b.ladder.iter().map(|r| r.seconds).sum();
        writeln!(s, "{},{},{},{},{},{},{}", b.u, b.v, b.h_lo, b.h_hi, n_trunc, level, seconds).expect("writing to a String");
    }
    Ok(s)
}

/// Infinite upper bounds are written as `inf`.
pub fn pressure_csv(rows: &[PressureBracket], config: &Value) -> String {
    let mut s = preamble(config, "t,p_lo,p_hi");
    for r in rows {
        let hi = if r.p_hi.is_infinite() {
            "inf".to_string()
        } else {
            r.p_hi.to_string()
        };
        writeln!(s, "{},{},{}", r.t, r.p_lo, hi).expect("writing to a String");
    }
    s
}

pub fn box_count_csv(result: &BoxCountResult, config: &Value) -> String {
    let mut s = preamble(config, "scale,count");
    for (scale, count) in result.scales.iter().zip(&result.counts) {
        writeln!(s, "{scale},{count}").expect("writing to a String");
    }
    s
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(tmp.path(), e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

const SIZE: f64 = 800.0;

/// Points of the canonical disk `|z - 1/2| <= 1/2` drawn on a square canvas.
pub fn scatter_svg(cloud: &PointCloud) -> String {
    let x = |re: f64| re * SIZE;
    let y = |im: f64| (0.5 - im) * SIZE;
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    )
    .expect("writing to a String");
    writeln!(
        s,
        r#"<title>tau = {}+{}i, N = {}, n = {}, {} points</title>"#,
        cloud.meta.u,
        cloud.meta.v,
        cloud.meta.truncation,
        cloud.meta.level,
        cloud.points.len()
    )
    .expect("writing to a String");
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).expect("writing to a String");
    writeln!(
        s,
        r##"<circle cx="{}" cy="{}" r="{}" fill="none" stroke="#999"/>"##,
        x(0.5),
        y(0.0),
        0.5 * SIZE
    )
    .expect("writing to a String");
    s.push_str(r#"<g fill="black">"#);
    s.push('\n');
    for z in &cloud.points {
        writeln!(s, r#"<rect x="{:.2}" y="{:.2}" width="1" height="1"/>"#, x(z.re), y(z.im)).expect("writing to a String");
    }
    s.push_str("</g>\n</svg>\n");
    s
}

/// Linear blue-to-yellow ramp.
fn ramp(f: f64) -> String {
    let f = if f.is_finite() { f.clamp(0.0, 1.0) } else { 0.0 };
    let lerp = |a: f64, b: f64| (a + (b - a) * f).round() as u8;
    format!("#{:02x}{:02x}{:02x}", lerp(40.0, 250.0), lerp(40.0, 220.0), lerp(140.0, 40.0))
}

/// One rectangle per cell colored by midpoint; each carries its bracket as a tooltip.
pub fn heatmap_svg(grid: &SweepGrid) -> String {
    let cell = SIZE / grid.columns.max(grid.rows) as f64;
    let (w, h) = (cell * grid.columns as f64, cell * grid.rows as f64);
    let mids: Vec<f64> = grid.cells.iter().map(|c| c.bracket.midpoint()).collect();
    let lo = mids.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = mids.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    )
    .expect("writing to a String");
    writeln!(s, "<title>midpoint range [{lo}, {hi}]</title>").expect("writing to a String");
    for (c, m) in grid.cells.iter().zip(&mids) {
        // Rows grow upwards with v.
        let (px, py) = (c.i as f64 * cell, (grid.rows - 1 - c.j) as f64 * cell);
        writeln!(
            s,
            r#"<rect x="{px}" y="{py}" width="{cell}" height="{cell}" fill="{}"><title>{}+{}i: [{}, {}]</title></rect>"#,
            ramp((m - lo) / span),
            c.u(),
            c.v(),
            c.bracket.h_lo,
            c.bracket.h_hi
        )
        .expect("writing to a String");
    }
    s.push_str("</svg>\n");
    s
}
