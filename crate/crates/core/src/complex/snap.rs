use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{TriComplex, GEOM_TOL};

/// Candidate branch set: interior vertices with their branch orders.
///
/// On hexagonal complexes every order is 1 and a critical point of order `k`
/// is represented by `k` distinct vertices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchAssignment {
    entries: Vec<(usize, u32)>,
}

impl BranchAssignment {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds an assignment, rejecting repeated vertices, boundary vertices and
    /// zero orders.
    pub fn new(complex: &TriComplex, entries: Vec<(usize, u32)>) -> Result<Self, SnapError> {
        for (i, &(v, k)) in entries.iter().enumerate() {
            if v >= complex.vertex_count() || !complex.is_interior(v) {
                return Err(SnapError::NotInterior(v));
            }
            if k == 0 {
                return Err(SnapError::ZeroOrder(v));
            }
            if entries[..i].iter().any(|&(u, _)| u == v) {
                return Err(SnapError::Duplicate(v));
            }
        }
        Ok(Self { entries })
    }

    /// Simple branch points at the given vertices.
    pub fn simple(complex: &TriComplex, vertices: &[usize]) -> Result<Self, SnapError> {
        Self::new(complex, vertices.iter().map(|&v| (v, 1)).collect())
    }

    pub fn entries(&self) -> &[(usize, u32)] {
        &self.entries
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|&(v, _)| v)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sum of orders.
    pub fn total_order(&self) -> u32 {
        self.entries.iter().map(|&(_, k)| k).sum()
    }

    pub fn order_of(&self, v: usize) -> u32 {
        self.entries.iter().find(|&&(u, _)| u == v).map_or(0, |&(_, k)| k)
    }

    /// Per-vertex order table of length `vertex_count`.
    pub fn order_table(&self, vertex_count: usize) -> Vec<u32> {
        let mut t = vec![0; vertex_count];
        for &(v, k) in &self.entries {
            t[v] = k;
        }
        t
    }

    pub fn same_set(&self, other: &Self) -> bool {
        let mut a = self.entries.clone();
        let mut b = other.entries.clone();
        a.sort_unstable();
        b.sort_unstable();
        a == b
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SnapError {
    #[error("vertex {0} is not an interior vertex")]
    NotInterior(usize),
    #[error("vertex {0} listed twice")]
    Duplicate(usize),
    #[error("vertex {0} has order zero")]
    ZeroOrder(usize),
    #[error("critical point {point} of order {order}: {reason}")]
    SnapFailed { point: Complex64, order: u32, reason: String },
}

/// Replaces each critical point `(x_i, k_i)` by its `k_i` nearest interior
/// lattice vertices, each carrying order 1. Distance ties go to the smaller
/// lattice coordinate `(k, l)`.
pub fn snap_branch_points(
    complex: &TriComplex,
    crit: &[(Complex64, u32)],
) -> Result<BranchAssignment, SnapError> {
    let interior = complex.interior_vertices();
    let spacing = complex.edge_length();
    let mut chosen: Vec<(usize, u32)> = Vec::new();

    for &(x, order) in crit {
        if order == 0 {
            continue;
        }
        let fail = |reason: String| SnapError::SnapFailed { point: x, order, reason };
        let mut mine: Vec<usize> = Vec::with_capacity(order as usize);
        for _ in 0..order {
            let mut best: Option<(f64, usize)> = None;
            for &v in &interior {
                if mine.contains(&v) {
                    continue;
                }
                let d = (complex.pos(v) - x).norm();
                let better = match best {
                    None => true,
                    Some((bd, bv)) => {
                        d < bd - GEOM_TOL || (d <= bd + GEOM_TOL && lattice_key(complex, v) < lattice_key(complex, bv))
                    }
                };
                if better {
                    best = Some((d, v));
                }
            }
            let (d, v) = best.ok_or_else(|| fail("not enough interior vertices".into()))?;
            let limit = f64::from(order + 2) * spacing;
            if d > limit + GEOM_TOL {
                return Err(fail(format!("nearest free vertex is {d:.4} away, more than {limit:.4}")));
            }
            if chosen.iter().any(|&(u, _)| u == v) {
                return Err(fail(format!("vertex {v} is already claimed by another critical point")));
            }
            mine.push(v);
        }
        chosen.extend(mine.into_iter().map(|v| (v, 1)));
    }
    if chosen.is_empty() && crit.iter().any(|&(_, k)| k > 0) {
        return Err(SnapError::SnapFailed {
            point: crit[0].0,
            order: crit[0].1,
            reason: "no vertices assigned".into(),
        });
    }
    BranchAssignment::new(complex, chosen)
}

fn lattice_key(complex: &TriComplex, v: usize) -> (i64, i64) {
    let lv = complex.vertex(v);
    (lv.k, lv.l)
}
