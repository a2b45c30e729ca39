use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::GEOM_TOL;

/// A Jordan domain: an explicit disk or a simple, positively oriented polygon.
/// Points are written as `[re, im]` pairs in problem files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DomainSpec {
    Disk { center: Complex64, radius: f64 },
    Polygon { vertices: Vec<Complex64> },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("disk radius must be positive, got {0}")]
    BadRadius(f64),
    #[error("polygon needs at least three vertices")]
    TooFewVertices,
    #[error("polygon edges {0} and {1} intersect")]
    SelfIntersecting(usize, usize),
    #[error("polygon is not positively oriented")]
    NegativeOrientation,
    #[error("the origin is not strictly inside the domain")]
    OriginOutside,
    #[error("normalisation point {0} must be real, positive and strictly inside the domain")]
    BadXi(Complex64),
    #[error("non-finite coordinate in domain")]
    NonFinite,
}

/// A point of `∂Ω` together with its boundary parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryPoint {
    pub point: Complex64,
    /// Traversal parameter: angle in `[0, 2π)` for a disk, `edge + t` for a polygon.
    pub param: f64,
    /// Polar angle in `[0, 2π)`, about the centre of a disk or the origin for a polygon.
    pub angle: f64,
    /// Fraction of perimeter in `[0, 1)` measured from the start of the traversal.
    pub arclength: f64,
}

impl DomainSpec {
    pub fn unit_disk() -> Self {
        DomainSpec::Disk { center: Complex64::new(0.0, 0.0), radius: 1.0 }
    }

    pub fn is_unit_disk(&self) -> bool {
        matches!(self, DomainSpec::Disk { center, radius }
            if center.norm() <= GEOM_TOL && (radius - 1.0).abs() <= GEOM_TOL)
    }

    pub fn validate(&self, xi: Complex64) -> Result<(), DomainError> {
        match self {
            DomainSpec::Disk { center, radius } => {
                if !(center.re.is_finite() && center.im.is_finite() && radius.is_finite()) {
                    return Err(DomainError::NonFinite);
                }
                if *radius <= 0.0 {
                    return Err(DomainError::BadRadius(*radius));
                }
            }
            DomainSpec::Polygon { vertices } => {
                if vertices.len() < 3 {
                    return Err(DomainError::TooFewVertices);
                }
                if vertices.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
                    return Err(DomainError::NonFinite);
                }
                let m = vertices.len();
                for i in 0..m {
                    for j in i + 1..m {
                        let adjacent = j == i + 1 || (i == 0 && j == m - 1);
                        if adjacent {
                            continue;
                        }
                        let (a, b) = (vertices[i], vertices[(i + 1) % m]);
                        let (c, d) = (vertices[j], vertices[(j + 1) % m]);
                        if segment_distance(a, b, c, d) <= GEOM_TOL {
                            return Err(DomainError::SelfIntersecting(i, j));
                        }
                    }
                }
                if polygon_signed_area(vertices) <= 0.0 {
                    return Err(DomainError::NegativeOrientation);
                }
            }
        }
        if !self.contains_strict(Complex64::new(0.0, 0.0)) {
            return Err(DomainError::OriginOutside);
        }
        if xi.im != 0.0 || xi.re <= 0.0 || !self.contains_strict(xi) {
            return Err(DomainError::BadXi(xi));
        }
        Ok(())
    }

    /// Axis-aligned bounding box as (lower-left, upper-right).
    pub fn bounding_box(&self) -> (Complex64, Complex64) {
        match self {
            DomainSpec::Disk { center, radius } => (
                center - Complex64::new(*radius, *radius),
                center + Complex64::new(*radius, *radius),
            ),
            DomainSpec::Polygon { vertices } => {
                let mut lo = vertices[0];
                let mut hi = vertices[0];
                for v in vertices {
                    lo.re = lo.re.min(v.re);
                    lo.im = lo.im.min(v.im);
                    hi.re = hi.re.max(v.re);
                    hi.im = hi.im.max(v.im);
                }
                (lo, hi)
            }
        }
    }

    /// Euclidean distance from `z` to `∂Ω`.
    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        (self.closest_boundary_point(z).point - z).norm()
    }

    /// True if `z` is inside and farther than [`GEOM_TOL`] from the boundary.
    pub fn contains_strict(&self, z: Complex64) -> bool {
        match self {
            DomainSpec::Disk { center, radius } => (z - center).norm() < radius - GEOM_TOL,
            DomainSpec::Polygon { vertices } => {
                point_in_polygon(vertices, z) && self.boundary_distance(z) > GEOM_TOL
            }
        }
    }

    /// Whether the closed triangle with the given corners lies in the open domain.
    pub fn contains_closed_triangle(&self, tri: [Complex64; 3]) -> bool {
        if !tri.iter().all(|&p| self.contains_strict(p)) {
            return false;
        }
        match self {
            // convexity
            DomainSpec::Disk { .. } => true,
            DomainSpec::Polygon { vertices } => {
                let m = vertices.len();
                (0..3).all(|i| {
                    let (a, b) = (tri[i], tri[(i + 1) % 3]);
                    (0..m).all(|j| segment_distance(a, b, vertices[j], vertices[(j + 1) % m]) > GEOM_TOL)
                })
            }
        }
    }

    /// A point of `∂Ω` nearest to `z`. Ties go to the smallest traversal parameter.
    pub fn closest_boundary_point(&self, z: Complex64) -> BoundaryPoint {
        match self {
            DomainSpec::Disk { center, radius } => {
                let d = z - center;
                let angle = if d.norm() == 0.0 { 0.0 } else { d.arg().rem_euclid(TAU) };
                // rem_euclid can return TAU for tiny negative angles
                let angle = if angle >= TAU { 0.0 } else { angle };
                BoundaryPoint {
                    point: center + Complex64::from_polar(*radius, angle),
                    param: angle,
                    angle,
                    arclength: angle / TAU,
                }
            }
            DomainSpec::Polygon { vertices } => {
                let m = vertices.len();
                let mut best: Option<(f64, usize, f64, Complex64)> = None;
                for i in 0..m {
                    let (a, b) = (vertices[i], vertices[(i + 1) % m]);
                    let (t, p) = project_to_segment(a, b, z);
                    let d = (p - z).norm();
                    let better = match best {
                        None => true,
                        Some((bd, _, _, _)) => d < bd - GEOM_TOL,
                    };
                    if better {
                        best = Some((d, i, t, p));
                    }
                }
                let (_, edge, t, point) = best.expect("polygon has edges");
                let perimeter = polygon_perimeter(vertices);
                let before: f64 = (0..edge).map(|i| (vertices[(i + 1) % m] - vertices[i]).norm()).sum();
                let along = before + t * (vertices[(edge + 1) % m] - vertices[edge]).norm();
                BoundaryPoint {
                    point,
                    param: edge as f64 + t,
                    angle: point.arg().rem_euclid(TAU),
                    arclength: (along / perimeter).rem_euclid(1.0),
                }
            }
        }
    }
}

fn polygon_signed_area(vertices: &[Complex64]) -> f64 {
    let m = vertices.len();
    0.5 * (0..m)
        .map(|i| {
            let (a, b) = (vertices[i], vertices[(i + 1) % m]);
            a.re * b.im - b.re * a.im
        })
        .sum::<f64>()
}

fn polygon_perimeter(vertices: &[Complex64]) -> f64 {
    let m = vertices.len();
    (0..m).map(|i| (vertices[(i + 1) % m] - vertices[i]).norm()).sum()
}

/// Even-odd point-in-polygon test.
fn point_in_polygon(vertices: &[Complex64], z: Complex64) -> bool {
    let m = vertices.len();
    let mut inside = false;
    let mut j = m - 1;
    for i in 0..m {
        let (a, b) = (vertices[i], vertices[j]);
        if (a.im > z.im) != (b.im > z.im) {
            let x = a.re + (z.im - a.im) * (b.re - a.re) / (b.im - a.im);
            if z.re < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Parameter in `[0, 1]` and the point of segment `[a, b]` closest to `z`.
fn project_to_segment(a: Complex64, b: Complex64, z: Complex64) -> (f64, Complex64) {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (0.0, a);
    }
    let t = (((z - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (t, a + ab * t)
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

fn segments_cross(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> bool {
    let d1 = cross(b - a, c - a);
    let d2 = cross(b - a, d - a);
    let d3 = cross(d - c, a - c);
    let d4 = cross(d - c, b - c);
    (d1 > 0.0) != (d2 > 0.0) && (d3 > 0.0) != (d4 > 0.0) && d1 != 0.0 && d2 != 0.0 && d3 != 0.0 && d4 != 0.0
}

/// Euclidean distance between segments `[a, b]` and `[c, d]`.
fn segment_distance(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> f64 {
    if segments_cross(a, b, c, d) {
        return 0.0;
    }
    [
        (project_to_segment(c, d, a).1 - a).norm(),
        (project_to_segment(c, d, b).1 - b).norm(),
        (project_to_segment(a, b, c).1 - c).norm(),
        (project_to_segment(a, b, d).1 - d).norm(),
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min)
}
