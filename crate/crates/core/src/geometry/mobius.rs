use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::domain::NormDomain;
use crate::error::{Error, Result};

/// Extremal values of `|φ'|` over a domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivBounds {
    pub inf_norm: f64,
    pub sup_norm: f64,
}

impl DerivBounds {
    /// Ratio `sup / inf`, the distortion of the map over the domain.
    pub fn distortion(&self) -> f64 {
        self.sup_norm / self.inf_norm
    }
}

/// A Möbius map `z ↦ (az + b) / (cz + d)` held as a normalized matrix.
///
/// Entries are rescaled by a power of two after every composition so the
/// largest magnitude lies in `[1/2, 1)`. The determinant is tracked through
/// the products and rescalings rather than recomputed from the entries, which
/// would cancel catastrophically for long words.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusMap {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
    det: Complex64,
}

impl MobiusMap {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let det = a * d - b * c;
        Self::from_parts(a, b, c, d, det)
    }

    fn from_parts(a: Complex64, b: Complex64, c: Complex64, d: Complex64, det: Complex64) -> Result<Self> {
        let finite = [a, b, c, d, det].iter().all(|z| z.re.is_finite() && z.im.is_finite());
        if !finite {
            return Err(Error::invalid("Möbius entries must be finite"));
        }
        if det.norm() < f64::MIN_POSITIVE {
            return Err(Error::NumericExhaustion);
        }
        let mut m = MobiusMap { a, b, c, d, det };
        m.normalize()?;
        Ok(m)
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        MobiusMap {
            a: one * 0.5,
            b: zero,
            c: zero,
            d: one * 0.5,
            det: one * 0.25,
        }
    }

    /// Matrix of `z ↦ 1/(z + b)`: rows `(0, 1)` and `(1, b)`.
    pub fn letter(b: Complex64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        MobiusMap::from_parts(zero, one, one, b, -one).expect("letter maps are nondegenerate")
    }

    /// Row-major entries `[a, b, c, d]`.
    pub fn entries(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn determinant(&self) -> Complex64 {
        self.det
    }

    /// The point sent to infinity, or `None` for affine maps.
    pub fn pole(&self) -> Option<Complex64> {
        if self.c == Complex64::new(0.0, 0.0) {
            None
        } else {
            Some(-self.d / self.c)
        }
    }

    fn normalize(&mut self) -> Result<()> {
        let largest = [self.a, self.b, self.c, self.d].iter().map(|z| z.norm()).fold(0.0, f64::max);
        if largest == 0.0 {
            return Err(Error::NumericExhaustion);
        }
        // frexp-style exponent so that largest * 2^-e lies in [1/2, 1).
        let e = largest.log2().floor() as i32 + 1;
        let scale = 2f64.powi(-e);
        self.a *= scale;
        self.b *= scale;
        self.c *= scale;
        self.d *= scale;
        self.det *= scale * scale;
        if self.det.norm() < f64::MIN_POSITIVE {
            return Err(Error::NumericExhaustion);
        }
        Ok(())
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &MobiusMap) -> Result<MobiusMap> {
        let (p, q) = (self, inner);
        MobiusMap::from_parts(
            p.a * q.a + p.b * q.c,
            p.a * q.b + p.b * q.d,
            p.c * q.a + p.d * q.c,
            p.c * q.b + p.d * q.d,
            p.det * q.det,
        )
    }

    pub fn apply(&self, z: Complex64) -> Result<Complex64> {
        let den = self.c * z + self.d;
        let scale = self.c.norm() * z.norm() + self.d.norm();
        if den.norm() <= f64::EPSILON * scale {
            return Err(Error::Pole { z });
        }
        Ok((self.a * z + self.b) / den)
    }

    /// `|φ'(z)| = |det| / |cz + d|^2`.
    pub fn deriv_norm(&self, z: Complex64) -> f64 {
        self.det.norm() / (self.c * z + self.d).norm_sqr()
    }

    /// Closed-form extrema of `|φ'|` over `domain` from the pole distance.
    pub fn deriv_bounds(&self, domain: &NormDomain) -> Result<DerivBounds> {
        let det = self.det.norm();
        let Some(pole) = self.pole() else {
            let v = det / self.d.norm_sqr();
            return Ok(DerivBounds { inf_norm: v, sup_norm: v });
        };
        let (near, far) = domain.min_max_distance(pole);
        if near <= 0.0 {
            return Err(Error::PoleInDomain { pole });
        }
        let c = self.c.norm();
        Ok(DerivBounds {
            inf_norm: det / (c * far).powi(2),
            sup_norm: det / (c * near).powi(2),
        })
    }
}

pub fn mobius_compose(outer: &MobiusMap, inner: &MobiusMap) -> Result<MobiusMap> {
    outer.compose(inner)
}

pub fn mobius_apply(map: &MobiusMap, z: Complex64) -> Result<Complex64> {
    map.apply(z)
}

pub fn mobius_deriv_bounds(map: &MobiusMap, domain: &NormDomain) -> Result<DerivBounds> {
    map.deriv_bounds(domain)
}
