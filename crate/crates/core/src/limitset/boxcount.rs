use std::collections::HashSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum cloud size accepted by the estimator.
pub const MIN_POINTS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxCountResult {
    /// Box side lengths, strictly decreasing.
    pub scales: Vec<f64>,
    pub counts: Vec<u64>,
    /// Least-squares slope of `log count` against `log(1/scale)`.
    pub slope: f64,
    pub r_squared: f64,
}

/// Counts occupied axis-aligned boxes at `levels` geometrically spaced scales
/// from `scale_max` down to `scale_min`.
pub fn box_counting_dim(points: &[Complex64], scale_min: f64, scale_max: f64, levels: usize) -> Result<BoxCountResult> {
    if points.len() < MIN_POINTS {
        return Err(Error::invalid(format!(
            "box counting needs at least {MIN_POINTS} points, got {}",
            points.len()
        )));
    }
    if !(0.0 < scale_min && scale_min < scale_max && scale_max <= 1.0) || levels < 2 {
        return Err(Error::invalid(format!(
            "need 0 < scale_min < scale_max <= 1 and at least 2 levels, got {scale_min}, {scale_max}, {levels}"
        )));
    }
    let ratio = (scale_min / scale_max).powf(1.0 / (levels - 1) as f64);
    let scales: Vec<f64> = (0..levels).map(|k| scale_max * ratio.powi(k as i32)).collect();
    let counts: Vec<u64> = scales
        .iter()
        .map(|&s| {
            let boxes: HashSet<(i64, i64)> = points
                .iter()
                .map(|z| ((z.re / s).floor() as i64, (z.im / s).floor() as i64))
                .collect();
            boxes.len() as u64
        })
        .collect();
    if counts.windows(2).all(|w| w[0] == w[1]) {
        return Err(Error::DegenerateFit(format!("every scale has {} occupied boxes", counts[0])));
    }
    let xs: Vec<f64> = scales.iter().map(|s| (1.0 / s).ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let (slope, r_squared) = fit(&xs, &ys);
    Ok(BoxCountResult {
        scales,
        counts,
        slope,
        r_squared,
    })
}

fn fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    (slope, r_squared)
}
