use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack used when testing whether a candidate extremal point lies
/// on an arc. Erring towards inclusion only widens the reported range.
const ARC_SLACK: f64 = 1e-12;

/// `|z|` without the overflow guard of `hypot`, which dominates hot loops.
trait Modulus {
    fn modulus(self) -> f64;
}

impl Modulus for Complex64 {
    #[inline]
    fn modulus(self) -> f64 {
        self.norm_sqr().sqrt()
    }
}

/// A closed disk in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskDomain {
    center: Complex64,
    radius: f64,
}

impl DiskDomain {
    pub fn new(center: Complex64, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || !center.re.is_finite() || !center.im.is_finite() {
            return Err(Error::invalid(format!(
                "disk needs a finite center and positive radius, got {center} / {radius}"
            )));
        }
        Ok(DiskDomain { center, radius })
    }

    /// The closed disk `|z - 1/2| <= 1/2` on which every system map acts.
    pub fn canonical() -> Self {
        DiskDomain {
            center: Complex64::new(0.5, 0.0),
            radius: 0.5,
        }
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        (z - self.center).modulus() <= self.radius + tol
    }

    pub fn min_max_distance(&self, p: Complex64) -> (f64, f64) {
        disk_min_max_distance(p, self)
    }

    /// Point of the boundary circle nearest to `p` (any point when `p` is the center).
    fn nearest_on_circle(&self, p: Complex64) -> Complex64 {
        let offset = p - self.center;
        let d = offset.modulus();
        if d == 0.0 {
            return self.center + self.radius;
        }
        self.center + offset * (self.radius / d)
    }

    fn farthest_on_circle(&self, p: Complex64) -> Complex64 {
        let offset = p - self.center;
        let d = offset.modulus();
        if d == 0.0 {
            return self.center + self.radius;
        }
        self.center - offset * (self.radius / d)
    }

    fn holds(&self, z: Complex64) -> bool {
        (z - self.center).modulus() <= self.radius * (1.0 + ARC_SLACK)
    }
}

/// Minimum and maximum distance from `p` to the closed disk.
pub fn disk_min_max_distance(p: Complex64, disk: &DiskDomain) -> (f64, f64) {
    let d = (p - disk.center).modulus();
    ((d - disk.radius).max(0.0), d + disk.radius)
}

/// Intersection of two closed disks whose boundary circles cross in two points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LensDomain {
    first: DiskDomain,
    second: DiskDomain,
    corners: [Complex64; 2],
}

impl LensDomain {
    pub fn new(first: DiskDomain, second: DiskDomain) -> Result<Self> {
        let axis = second.center - first.center;
        let d = axis.modulus();
        let (r1, r2) = (first.radius, second.radius);
        if d == 0.0 || d >= r1 + r2 || d <= (r1 - r2).abs() {
            return Err(Error::invalid("lens needs two disks whose boundary circles cross in two points"));
        }
        let along = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
        let half_chord = (r1 * r1 - along * along).max(0.0).sqrt();
        let unit = axis / d;
        let base = first.center + unit * along;
        let normal = Complex64::new(-unit.im, unit.re) * half_chord;
        Ok(LensDomain {
            first,
            second,
            corners: [base + normal, base - normal],
        })
    }

    pub fn disks(&self) -> (DiskDomain, DiskDomain) {
        (self.first, self.second)
    }

    pub fn corners(&self) -> [Complex64; 2] {
        self.corners
    }

    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        self.first.contains(z, tol) && self.second.contains(z, tol)
    }

    /// Exact extremal distances from `p` to the lens.
    ///
    /// The nearest point is a projection onto one disk that lands in the other,
    /// or else a corner. The farthest point is the antipode on one of the two
    /// arcs when that antipode lies on the arc, or else a corner.
    pub fn min_max_distance(&self, p: Complex64) -> (f64, f64) {
        let (a, b) = (&self.first, &self.second);
        let [c0, c1] = self.corners;
        let corner_min = (p - c0).modulus().min((p - c1).modulus());
        let corner_max = (p - c0).modulus().max((p - c1).modulus());

        let min = if a.holds(p) && b.holds(p) {
            0.0
        } else {
            let qa = if a.holds(p) { p } else { a.nearest_on_circle(p) };
            let qb = if b.holds(p) { p } else { b.nearest_on_circle(p) };
            if b.holds(qa) {
                (p - qa).modulus()
            } else if a.holds(qb) {
                (p - qb).modulus()
            } else {
                corner_min
            }
        };

        let mut max = corner_max;
        let fa = a.farthest_on_circle(p);
        if b.holds(fa) {
            max = max.max((p - fa).modulus());
        }
        let fb = b.farthest_on_circle(p);
        if a.holds(fb) {
            max = max.max((p - fb).modulus());
        }

        // Both component disks bound the lens from outside.
        let (a_min, a_max) = a.min_max_distance(p);
        let (b_min, b_max) = b.min_max_distance(p);
        (min.max(a_min).max(b_min), max.min(a_max).min(b_max))
    }
}

/// Domain over which derivative norms are taken.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NormDomain {
    Disk(DiskDomain),
    Lens(LensDomain),
}

impl NormDomain {
    #[inline]
    pub fn min_max_distance(&self, p: Complex64) -> (f64, f64) {
        match self {
            NormDomain::Disk(d) => d.min_max_distance(p),
            NormDomain::Lens(l) => l.min_max_distance(p),
        }
    }

    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        match self {
            NormDomain::Disk(d) => d.contains(z, tol),
            NormDomain::Lens(l) => l.contains(z, tol),
        }
    }
}

impl From<DiskDomain> for NormDomain {
    fn from(d: DiskDomain) -> Self {
        NormDomain::Disk(d)
    }
}

impl From<LensDomain> for NormDomain {
    fn from(l: LensDomain) -> Self {
        NormDomain::Lens(l)
    }
}
