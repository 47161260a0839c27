//! Complex-plane primitives: closed disks, two-disk lenses, and Möbius maps
//! with closed-form derivative extrema over those domains.

mod domain;
mod mobius;

pub use domain::{disk_min_max_distance, DiskDomain, LensDomain, NormDomain};
pub use mobius::{mobius_apply, mobius_compose, mobius_deriv_bounds, DerivBounds, MobiusMap};
