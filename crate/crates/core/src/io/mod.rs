//! Text and binary formats: CLI literals, the `CCF1` point format, tabular
//! and SVG artifacts, the rung cache, and run configuration files.

mod cache;
mod config;
mod output;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sweep::Region;

pub use cache::{parse_cache_line, CacheEntry, RungCache, CACHE_DIR_ENV, CACHE_FILE};
pub use config::{load_run_config, parse_run_config, RunConfig};
pub use output::{box_count_csv, cloud_csv, grid_csv, heatmap_svg, ladder_csv, pressure_csv, scatter_svg, to_json, write_atomic, Artifact};

/// `[+-]digits[.digits][(e|E)[+-]digits]`, also accepting `.5` and `5.`.
fn is_decimal(s: &str) -> bool {
    let s = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(k) => (&s[..k], Some(&s[k + 1..])),
        None => (s, None),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
    let mantissa_ok = digits(int) && digits(frac) && !(int.is_empty() && frac.is_empty());
    let exponent_ok = exponent.is_none_or(|e| {
        let e = e.strip_prefix(['+', '-']).unwrap_or(e);
        !e.is_empty() && digits(e)
    });
    mantissa_ok && exponent_ok
}

fn decimal(s: &str, what: &str) -> Result<f64> {
    if !is_decimal(s) {
        return Err(Error::Parse(format!("{what}: expected a decimal number, got {s:?}")));
    }
    let x: f64 = s.parse().map_err(|_| Error::Parse(format!("{what}: {s:?} is not a number")))?;
    if !x.is_finite() {
        return Err(Error::Parse(format!("{what}: {s:?} is out of range")));
    }
    Ok(x)
}

/// Parses `a+bi` or `a-bi` with decimal `a` and `b`; `b` may be omitted (`1+i`).
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let body = s
        .strip_suffix('i')
        .ok_or_else(|| Error::Parse(format!("complex literal {s:?} must end in 'i' (form a+bi)")))?;
    // The separating sign is the last one not at the start and not part of an exponent.
    let split = body
        .char_indices()
        .filter(|&(k, c)| (c == '+' || c == '-') && k > 0 && !matches!(body.as_bytes()[k - 1], b'e' | b'E'))
        .map(|(k, _)| k)
        .last()
        .ok_or_else(|| Error::Parse(format!("complex literal {s:?} needs both parts (form a+bi)")))?;
    let (re, im) = body.split_at(split);
    let im = match im {
        "+" => "1",
        "-" => "-1",
        other => other,
    };
    Ok(Complex64::new(decimal(re, "real part")?, decimal(im, "imaginary part")?))
}

/// Parses `u0,u1,v0,v1`.
pub fn parse_region(s: &str) -> Result<Region> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(Error::Parse(format!("region {s:?} must have four fields u0,u1,v0,v1")));
    }
    let x = parts.iter().map(|p| decimal(p, "region bound")).collect::<Result<Vec<_>>>()?;
    if x[0] > x[1] || x[2] > x[3] {
        return Err(Error::Parse(format!("region {s:?} needs u0 <= u1 and v0 <= v1")));
    }
    Region::new(x[0], x[1], x[2], x[3])
}

/// Largest exponent accepted on a pressure grid.
pub const T_GRID_MAX: f64 = 3.0;
/// Longest grid accepted.
pub const T_GRID_MAX_LEN: usize = 100_000;

/// Parses a comma list `1,1.5,2` or a range `start:stop:step` of exponents in `[0, 3]`.
pub fn parse_t_grid(s: &str) -> Result<Vec<f64>> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("t-grid is empty".into()));
    }
    let ts = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("t range {s:?} must be start:stop:step")));
        }
        let (a, b, h) = (
            decimal(parts[0], "t start")?,
            decimal(parts[1], "t stop")?,
            decimal(parts[2], "t step")?,
        );
        if !(h > 0.0) || b < a {
            return Err(Error::Parse(format!("t range {s:?} needs start <= stop and step > 0")));
        }
        let count = ((b - a) / h + 1e-9).floor() + 1.0;
        if count > T_GRID_MAX_LEN as f64 {
            return Err(Error::Parse(format!("t range {s:?} has more than {T_GRID_MAX_LEN} points")));
        }
        (0..count as usize).map(|k| a + k as f64 * h).collect()
    } else {
        s.split(',').map(|p| decimal(p.trim(), "t value")).collect::<Result<Vec<_>>>()?
    };
    if ts.len() > T_GRID_MAX_LEN {
        return Err(Error::Parse(format!("t-grid has more than {T_GRID_MAX_LEN} points")));
    }
    if let Some(t) = ts.iter().find(|t| !(0.0..=T_GRID_MAX).contains(*t)) {
        return Err(Error::Parse(format!("t = {t} lies outside [0, {T_GRID_MAX}]")));
    }
    Ok(ts)
}

/// Magic prefix of the binary point format.
pub const CCF1_MAGIC: &[u8; 4] = b"CCF1";

/// `CCF1`, a little-endian `u64` count, then `(re, im)` as little-endian `f64` pairs.
pub fn encode_ccf1(points: &[Complex64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + 16 * points.len());
    out.extend_from_slice(CCF1_MAGIC);
    out.extend_from_slice(&(points.len() as u64).to_le_bytes());
    for z in points {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

pub fn decode_ccf1(bytes: &[u8]) -> Result<Vec<Complex64>> {
    let rest = bytes
        .strip_prefix(CCF1_MAGIC.as_slice())
        .ok_or_else(|| Error::Parse("missing CCF1 magic".into()))?;
    if rest.len() < 8 {
        return Err(Error::Parse("CCF1 header is truncated".into()));
    }
    let (count, body) = rest.split_at(8);
    let count = u64::from_le_bytes(count.try_into().expect("eight bytes"));
    if count.checked_mul(16) != Some(body.len() as u64) {
        return Err(Error::Parse(format!(
            "CCF1 declares {count} points but carries {} bytes",
            body.len()
        )));
    }
    body.chunks_exact(16)
        .enumerate()
        .map(|(k, c)| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("eight bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("eight bytes"));
            if !(re.is_finite() && im.is_finite()) {
                return Err(Error::Parse(format!("CCF1 point {k} is not finite")));
            }
            Ok(Complex64::new(re, im))
        })
        .collect()
}
