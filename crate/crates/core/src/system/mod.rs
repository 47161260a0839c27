//! The family `S_τ = {φ_b(z) = 1/(z + b) : b = m + nτ, m, n ≥ 1}`.

mod checks;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DerivBounds, DiskDomain, LensDomain, MobiusMap, NormDomain};

pub use checks::{geometry_report, ratio_constants, verify_geometry, GeometryCheck, GeometryReport};

/// Longest word accepted by [`Word::new`] unless a caller asks for more.
pub const DEFAULT_MAX_WORD_LEN: usize = 16;

/// A point `τ = u + iv` with `u ≥ 0` and `v ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Parameter {
    u: f64,
    v: f64,
}

impl Parameter {
    pub fn new(u: f64, v: f64) -> Result<Self> {
        if !(u.is_finite() && v.is_finite()) || u < 0.0 || v < 1.0 {
            return Err(Error::OutOfDomain { u, v });
        }
        Ok(Parameter { u, v })
    }

    pub fn from_complex(tau: Complex64) -> Result<Self> {
        Parameter::new(tau.re, tau.im)
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn tau(&self) -> Complex64 {
        Complex64::new(self.u, self.v)
    }

    pub fn is_interior(&self) -> bool {
        self.u > 0.0 && self.v > 1.0
    }
}

pub fn validate_parameter(u: f64, v: f64) -> Result<Parameter> {
    Parameter::new(u, v)
}

/// Lattice index `(m, n)` of the letter `b = m + nτ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub m: u32,
    pub n: u32,
}

impl Letter {
    pub fn new(m: u32, n: u32) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::invalid(format!("letter indices start at 1, got ({m}, {n})")));
        }
        Ok(Letter { m, n })
    }

    pub fn value(&self, tau: &Parameter) -> Complex64 {
        letter_value(*self, tau)
    }
}

pub fn letter_value(letter: Letter, tau: &Parameter) -> Complex64 {
    Complex64::new(letter.m as f64, 0.0) + tau.tau() * letter.n as f64
}

/// Exact extrema of `|φ_b'| = 1/|z + b|^2` over the canonical disk.
pub fn letter_deriv_norm(letter: Letter, tau: &Parameter) -> DerivBounds {
    let r = (letter_value(letter, tau) + 0.5).norm();
    DerivBounds {
        inf_norm: (r + 0.5).powi(-2),
        sup_norm: (r - 0.5).powi(-2),
    }
}

/// A nonempty finite sequence of letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Result<Self> {
        Word::with_max_len(letters, DEFAULT_MAX_WORD_LEN)
    }

    pub fn with_max_len(letters: Vec<Letter>, max_len: usize) -> Result<Self> {
        if letters.is_empty() || letters.len() > max_len {
            return Err(Error::invalid(format!("word length {} outside 1..={max_len}", letters.len())));
        }
        Ok(Word(letters))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Matrix of `φ_{w1} ∘ ⋯ ∘ φ_{wn}`.
    pub fn map(&self, tau: &Parameter) -> Result<MobiusMap> {
        self.0
            .iter()
            .try_fold(MobiusMap::identity(), |acc, l| acc.compose(&MobiusMap::letter(l.value(tau))))
    }
}

/// The finite alphabet `F(N) = {(m, n) : 1 ≤ m, n ≤ N}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Truncation(u32);

impl Truncation {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("truncation N must be at least 1"));
        }
        Ok(Truncation(n))
    }

    pub fn get(&self) -> u32 {
        self.0
    }

    pub fn letter_count(&self) -> u64 {
        u64::from(self.0) * u64::from(self.0)
    }

    pub fn contains(&self, letter: Letter) -> bool {
        letter.m <= self.0 && letter.n <= self.0
    }

    /// Letters in row-major order: `n` outer, `m` inner.
    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        let n_max = self.0;
        (1..=n_max).flat_map(move |n| (1..=n_max).map(move |m| Letter { m, n }))
    }

    pub fn values(&self, tau: &Parameter) -> Vec<Complex64> {
        self.letters().map(|l| l.value(tau)).collect()
    }
}

/// The lens `D(r1, r1) ∩ D(-i r2, r2)` with `r1 = 1/(2(1+u))`, `r2 = 1/(2v-1)`.
///
/// Every letter image `φ_b(X)` lies in it and it lies in `X`, so it is
/// forward-invariant and norms over it give the same pressure as norms over `X`.
pub fn system_lens(tau: &Parameter) -> LensDomain {
    let r1 = 0.5 / (1.0 + tau.u());
    let r2 = 1.0 / (2.0 * tau.v() - 1.0);
    let right = DiskDomain::new(Complex64::new(r1, 0.0), r1).expect("positive radius");
    let below = DiskDomain::new(Complex64::new(0.0, -r2), r2).expect("positive radius");
    LensDomain::new(right, below).expect("circles tangent to both axes at 0 always cross")
}

/// Which set the derivative norms range over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    Disk,
    #[default]
    Lens,
}

impl DomainKind {
    pub fn domain(&self, tau: &Parameter) -> NormDomain {
        match self {
            DomainKind::Disk => NormDomain::Disk(DiskDomain::canonical()),
            DomainKind::Lens => NormDomain::Lens(system_lens(tau)),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            DomainKind::Disk => "disk",
            DomainKind::Lens => "lens",
        }
    }
}

impl std::str::FromStr for DomainKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "disk" => Ok(DomainKind::Disk),
            "lens" => Ok(DomainKind::Lens),
            other => Err(Error::Parse(format!("unknown domain {other:?} (expected disk or lens)"))),
        }
    }
}
