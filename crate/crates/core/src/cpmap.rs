//! Simplicial maps between combinatorially equivalent packings.

use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::complex::{lattice_coords, FaceCell, TriComplex, GEOM_TOL};
use crate::solver::PackingSolution;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CpMapError {
    #[error("point {0} is outside the carrier")]
    OutsideCarrier(Complex64),
    #[error("packings are not over the same complex")]
    DifferentComplexes,
    #[error("source packing is not the regular packing (defect {0:e})")]
    IrregularSource(f64),
    #[error("max principle violated at interior vertex {vertex}: ratio {ratio} beyond boundary bound {bound}")]
    AuditFailed { vertex: usize, ratio: f64, bound: f64 },
    #[error("no max principle applies to these branch sets")]
    Incomparable,
}

/// A face of the complex and barycentric weights aligned with its vertex triple.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Location {
    pub face: usize,
    pub weights: [f64; 3],
}

/// Finds the lattice face containing `z` by lattice arithmetic.
///
/// Points on shared edges or vertices go to the face with the lowest index.
pub fn locate_in_complex(complex: &TriComplex, z: Complex64) -> Result<Location, CpMapError> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(CpMapError::OutsideCarrier(z));
    }
    let n = complex.mesh_n();
    let (kf, lf) = lattice_coords(z, n);
    let tol = GEOM_TOL * f64::from(n);
    let (k0, l0) = (kf.floor() as i64, lf.floor() as i64);

    let mut best: Option<Location> = None;
    for l in l0 - 1..=l0 + 1 {
        for k in k0 - 1..=k0 + 1 {
            for cell in [FaceCell::upper(k, l), FaceCell::lower(k, l)] {
                let Some(face) = complex.face_of_cell(cell) else { continue };
                if best.is_some_and(|b| b.face < face) {
                    continue;
                }
                let (s, t) = (kf - k as f64, lf - l as f64);
                let w = if cell.upper { [1.0 - s - t, s, t] } else { [1.0 - t, s + t - 1.0, 1.0 - s] };
                if w.iter().all(|&x| x >= -tol) {
                    best = Some(Location { face, weights: w });
                }
            }
        }
    }
    let mut loc = best.ok_or(CpMapError::OutsideCarrier(z))?;
    for x in &mut loc.weights {
        *x = x.clamp(0.0, 1.0);
    }
    let total: f64 = loc.weights.iter().sum();
    for x in &mut loc.weights {
        *x /= total;
    }
    Ok(loc)
}

/// The cp-map from the regular packing of a complex to a solved packing of the
/// same complex, with its ratio function.
#[derive(Clone, Debug)]
pub struct CpMap {
    source: PackingSolution,
    target: PackingSolution,
}

impl CpMap {
    /// Pairs `target` with the regular packing of its complex.
    pub fn new(target: PackingSolution) -> Self {
        let source = PackingSolution::regular(Arc::clone(&target.complex));
        Self { source, target }
    }

    /// Pairs two packings; `source` must be the regular packing of the shared complex.
    pub fn from_pair(source: PackingSolution, target: PackingSolution) -> Result<Self, CpMapError> {
        if !Arc::ptr_eq(&source.complex, &target.complex) {
            return Err(CpMapError::DifferentComplexes);
        }
        let r = 1.0 / f64::from(source.complex.mesh_n());
        let defect = (0..source.complex.vertex_count())
            .map(|v| (source.centers[v] - source.complex.pos(v)).norm().max((source.radii[v] - r).abs()))
            .fold(0.0, f64::max);
        if defect > GEOM_TOL {
            return Err(CpMapError::IrregularSource(defect));
        }
        Ok(Self { source, target })
    }

    pub fn source(&self) -> &PackingSolution {
        &self.source
    }

    pub fn target(&self) -> &PackingSolution {
        &self.target
    }

    pub fn complex(&self) -> &TriComplex {
        &self.target.complex
    }

    pub fn locate(&self, z: Complex64) -> Result<Location, CpMapError> {
        locate_in_complex(&self.source.complex, z)
    }

    fn combine<T>(&self, z: Complex64, value: impl Fn(usize) -> T) -> Result<T, CpMapError>
    where
        T: std::ops::Mul<f64, Output = T> + std::iter::Sum,
    {
        let loc = self.locate(z)?;
        let f = self.complex().faces()[loc.face];
        Ok((0..3).map(|i| value(f[i]) * loc.weights[i]).sum())
    }

    /// `f_n(z)`: the barycentric image of `z` in the target carrier.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64, CpMapError> {
        self.combine(z, |v| self.target.centers[v])
    }

    /// `f_n♯(z)`: affine interpolation of the vertex ratios `r_target / r_source`.
    pub fn ratio(&self, z: Complex64) -> Result<f64, CpMapError> {
        self.combine(z, |v| self.vertex_ratio(v))
    }

    pub fn vertex_ratio(&self, v: usize) -> f64 {
        self.target.radii[v] / self.source.radii[v]
    }

    pub fn vertex_ratios(&self) -> Vec<f64> {
        (0..self.complex().vertex_count()).map(|v| self.vertex_ratio(v)).collect()
    }

    /// Largest overlap `r_u + r_w − |c_u − c_w|` over non-adjacent pairs of target circles.
    pub fn max_overlap(&self) -> f64 {
        let c = self.complex();
        let t = &self.target;
        let mut worst = f64::NEG_INFINITY;
        for u in 0..c.vertex_count() {
            let nb = c.neighbors(u);
            for w in u + 1..c.vertex_count() {
                if nb.contains(&w) {
                    continue;
                }
                let gap = t.radii[u] + t.radii[w] - (t.centers[u] - t.centers[w]).norm();
                worst = worst.max(gap);
            }
        }
        worst
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditReport {
    pub min: f64,
    pub max: f64,
    pub boundary_min: f64,
    pub boundary_max: f64,
    pub constant: bool,
    /// Whether the infimum was also required to sit on the boundary.
    pub checked_inf: bool,
}

const AUDIT_REL_TOL: f64 = 1e-9;

/// Checks the maximum principles for the ratio `r_b / r_a` of the two targets.
///
/// With equal branch sets both extrema must be attained on boundary vertices
/// unless the ratio is constant; with `a` unbranched and `b` branched only the
/// supremum is constrained.
pub fn max_principle_audit(map_a: &CpMap, map_b: &CpMap) -> Result<AuditReport, CpMapError> {
    let (a, b) = (map_a.target(), map_b.target());
    if !Arc::ptr_eq(&a.complex, &b.complex) {
        return Err(CpMapError::DifferentComplexes);
    }
    let checked_inf = if a.branch.same_set(&b.branch) {
        true
    } else if a.branch.is_empty() {
        false
    } else {
        return Err(CpMapError::Incomparable);
    };

    let c = &a.complex;
    let q: Vec<f64> = (0..c.vertex_count()).map(|v| b.radii[v] / a.radii[v]).collect();
    let min = q.iter().copied().fold(f64::INFINITY, f64::min);
    let max = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let bd = c.boundary_vertices();
    let boundary_min = bd.iter().map(|&v| q[v]).fold(f64::INFINITY, f64::min);
    let boundary_max = bd.iter().map(|&v| q[v]).fold(f64::NEG_INFINITY, f64::max);
    let constant = max - min <= AUDIT_REL_TOL * max;
    let report = AuditReport { min, max, boundary_min, boundary_max, constant, checked_inf };
    if constant && checked_inf {
        return Ok(report);
    }
    for v in c.interior_vertices() {
        if q[v] > boundary_max * (1.0 + AUDIT_REL_TOL) {
            return Err(CpMapError::AuditFailed { vertex: v, ratio: q[v], bound: boundary_max });
        }
        if checked_inf && q[v] < boundary_min * (1.0 - AUDIT_REL_TOL) {
            return Err(CpMapError::AuditFailed { vertex: v, ratio: q[v], bound: boundary_min });
        }
    }
    Ok(report)
}
