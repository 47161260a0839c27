//! Certified Hausdorff-dimension brackets for the limit sets of the
//! generalized complex continued fraction systems `{z ↦ 1/(z + m + nτ)}`.

pub mod error;
pub mod geometry;

pub use error::{Error, Result};
pub mod io;
pub mod limitset;
pub mod pressure;
pub mod solver;
pub mod sweep;
pub mod system;
