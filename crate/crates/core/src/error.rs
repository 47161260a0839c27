use std::path::PathBuf;

use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter {u}+{v}i lies outside the parameter space (need u >= 0 and v >= 1)")]
    OutOfDomain { u: f64, v: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A composed Möbius matrix lost its determinant to underflow.
    #[error("numeric exhaustion: composed map determinant underflowed to zero")]
    NumericExhaustion,

    #[error("{z} is the pole of the map")]
    Pole { z: Complex64 },

    #[error("pole {pole} lies in or on the domain")]
    PoleInDomain { pole: Complex64 },

    #[error("enumeration needs {required:.3e} items, over the budget of {budget}; reduce N or n")]
    BudgetExceeded { required: f64, budget: u64 },

    #[error("no sign change on [{a}, {b}]: f(a) = {fa}, f(b) = {fb}")]
    NoSignChange { a: f64, b: f64, fa: f64, fb: f64 },

    #[error("degenerate box-counting fit: {0}")]
    DegenerateFit(String),

    #[error("{check} violated: {detail}")]
    CheckFailed { check: String, detail: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
