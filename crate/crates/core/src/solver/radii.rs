use std::f64::consts::TAU;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::angle::{angle_sum, angle_sum_supremum, solve_vertex_radius};
use super::{SolveError, SolverConfig, SweepOrder};
use crate::complex::{BranchAssignment, TriComplex};

/// Radius (in units of the mean boundary radius) below which a circle counts as
/// collapsed. Branch sets that are not branch structures drive some radii to 0
/// while the angle sums still converge.
const COLLAPSE_RADIUS: f64 = 1e-12;

/// Per-vertex Euclidean circle radii.
#[derive(Clone, Debug, PartialEq)]
pub struct RadiusFunction(pub Vec<f64>);

impl RadiusFunction {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self(self.0.iter().map(|r| r * c).collect())
    }
}

impl std::ops::Index<usize> for RadiusFunction {
    type Output = f64;

    fn index(&self, v: usize) -> &f64 {
        &self.0[v]
    }
}

#[derive(Clone, Debug)]
pub struct RadiusSolve {
    pub radii: RadiusFunction,
    pub sweeps: usize,
    /// Max over interior vertices of `|Θ(v) − 2π(1 + k_v)|`.
    pub residual: f64,
}

/// Target angle sum `2π(1 + k_v)` for every vertex (only interior entries matter).
pub fn target_angle_sums(complex: &TriComplex, branch: &BranchAssignment) -> Vec<f64> {
    branch
        .order_table(complex.vertex_count())
        .into_iter()
        .map(|k| TAU * f64::from(1 + k))
        .collect()
}

/// Max angle-sum defect over interior vertices.
pub fn angle_residual(complex: &TriComplex, radii: &[f64], targets: &[f64]) -> f64 {
    complex
        .interior_vertices()
        .into_iter()
        .map(|v| (angle_sum(complex, radii, v) - targets[v]).abs())
        .fold(0.0, f64::max)
}

/// Solves for interior radii given boundary radii and a branch set.
///
/// `boundary_radii` is aligned with [`TriComplex::boundary_vertices`]. Interior
/// radii start at the mean boundary radius.
pub fn solve_radii(
    complex: &TriComplex,
    boundary_radii: &[f64],
    branch: &BranchAssignment,
    config: &SolverConfig,
) -> Result<RadiusSolve, SolveError> {
    let boundary = complex.boundary_vertices();
    check_boundary(&boundary, boundary_radii)?;
    let mean = boundary_radii.iter().sum::<f64>() / boundary_radii.len() as f64;
    let mut initial = vec![mean; complex.vertex_count()];
    for (&v, &r) in boundary.iter().zip(boundary_radii) {
        initial[v] = r;
    }
    solve_radii_from(complex, boundary_radii, branch, config, &initial)
}

/// Like [`solve_radii`] but starting the interior from `initial`.
pub fn solve_radii_from(
    complex: &TriComplex,
    boundary_radii: &[f64],
    branch: &BranchAssignment,
    config: &SolverConfig,
    initial: &[f64],
) -> Result<RadiusSolve, SolveError> {
    config.validate()?;
    let boundary = complex.boundary_vertices();
    check_boundary(&boundary, boundary_radii)?;
    if initial.len() != complex.vertex_count() {
        return Err(SolveError::LengthMismatch { expected: complex.vertex_count(), got: initial.len() });
    }
    if let Some(v) = initial.iter().position(|&r| !(r > 0.0 && r.is_finite())) {
        return Err(SolveError::NonPositiveRadius { vertex: v });
    }

    let targets = target_angle_sums(complex, branch);
    let interior = complex.interior_vertices();
    for &v in &interior {
        let sup = angle_sum_supremum(complex.fan(v).len());
        if targets[v] >= sup {
            return Err(SolveError::UnattainableAngleSum { vertex: v, target: targets[v], supremum: sup });
        }
    }

    // Work in units of the mean boundary radius so that the iteration is
    // exactly homogeneous in the boundary data.
    let scale = boundary_radii.iter().sum::<f64>() / boundary_radii.len() as f64;
    let mut r: Vec<f64> = initial.iter().map(|x| x / scale).collect();
    for (&v, &rho) in boundary.iter().zip(boundary_radii) {
        r[v] = rho / scale;
    }

    let mut order = interior.clone();
    let mut rng = match config.sweep_order {
        SweepOrder::Natural => None,
        SweepOrder::Shuffled { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
    };
    let omega = config.relaxation;
    let mut petals: Vec<(f64, f64)> = Vec::with_capacity(8);

    let mut residual = angle_residual(complex, &r, &targets);
    let mut sweeps = 0;
    while residual >= config.angle_tol {
        if sweeps >= config.max_sweeps {
            return Err(SolveError::NonConvergence { sweeps, residual });
        }
        if let Some(rng) = rng.as_mut() {
            order.shuffle(rng);
        }
        for &v in &order {
            petals.clear();
            petals.extend(complex.petals(v).map(|(u, w)| (r[u], r[w])));
            let exact = solve_vertex_radius(&petals, targets[v], r[v]);
            r[v] = if omega == 1.0 { exact } else { r[v] * (omega * (exact / r[v]).ln()).exp() };
        }
        sweeps += 1;
        residual = angle_residual(complex, &r, &targets);
        if !residual.is_finite() || r.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
            return Err(SolveError::NonConvergence { sweeps, residual });
        }
        if let Some(&v) = order.iter().find(|&&v| r[v] < COLLAPSE_RADIUS) {
            return Err(SolveError::Degenerate { vertex: v, radius: r[v] * scale });
        }
    }

    for x in &mut r {
        *x *= scale;
    }
    // boundary radii are reproduced bit for bit
    for (&v, &rho) in boundary.iter().zip(boundary_radii) {
        r[v] = rho;
    }
    let residual = angle_residual(complex, &r, &targets);
    Ok(RadiusSolve { radii: RadiusFunction(r), sweeps, residual })
}

fn check_boundary(boundary: &[usize], boundary_radii: &[f64]) -> Result<(), SolveError> {
    if boundary.len() != boundary_radii.len() {
        return Err(SolveError::LengthMismatch { expected: boundary.len(), got: boundary_radii.len() });
    }
    if let Some(i) = boundary_radii.iter().position(|&r| !(r > 0.0 && r.is_finite())) {
        return Err(SolveError::NonPositiveRadius { vertex: boundary[i] });
    }
    Ok(())
}
