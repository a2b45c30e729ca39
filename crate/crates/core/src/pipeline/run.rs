use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use super::spec::ProblemSpec;
use crate::branch_check::{verify_on_lattice, CycleWitness, Verdict};
use crate::complex::{build_subcomplex, snap_branch_points, BoundaryPoint, BranchAssignment, BuildError, SnapError, TriComplex};
use crate::cpmap::CpMap;
use crate::solver::{normalize, PackingSolution, SolveError};
use crate::Complex64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshFailure {
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Snap(#[from] SnapError),
    #[error("branch set is not a branch structure: cycle of length {} encloses weight {}", .0.length, .0.enclosed_weight)]
    Branch(CycleWitness),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

impl MeshFailure {
    /// Short status label for reports.
    pub fn label(&self) -> &'static str {
        match self {
            MeshFailure::Build(BuildError::MeshTooCoarse(_)) => "mesh_too_coarse",
            MeshFailure::Build(BuildError::Domain(_)) => "bad_domain",
            MeshFailure::Snap(_) => "snap_failed",
            MeshFailure::Branch(_) => "not_branch_structure",
            MeshFailure::Solve(SolveError::NonConvergence { .. }) => "non_convergence",
            MeshFailure::Solve(SolveError::Degenerate { .. }) => "degenerate",
            MeshFailure::Solve(SolveError::LayoutInconsistent { .. }) => "layout_inconsistent",
            MeshFailure::Solve(_) => "solve_failed",
        }
    }
}

/// A boundary vertex with its nearest boundary point and prescribed `λ(z_v)`.
#[derive(Clone, Copy, Debug)]
pub struct BoundaryDatum {
    pub vertex: usize,
    pub nearest: BoundaryPoint,
    pub lambda: f64,
}

/// One successful approximation step.
#[derive(Clone, Debug)]
pub struct MeshRun {
    pub n: u32,
    pub complex: Arc<TriComplex>,
    pub branch: BranchAssignment,
    pub boundary: Vec<BoundaryDatum>,
    pub map: CpMap,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct MeshOutcome {
    pub n: u32,
    pub result: Result<MeshRun, MeshFailure>,
}

/// Builds the complex, places the branch vertices, checks them, solves with
/// boundary radii `λ(z_v)/n`, lays out and normalises.
pub fn run_mesh(spec: &ProblemSpec, n: u32) -> Result<MeshRun, MeshFailure> {
    let start = Instant::now();
    let xi = spec.xi_point();
    let complex = Arc::new(build_subcomplex(&spec.domain, xi, n)?);

    let crit = spec.crit_list();
    let branch = if crit.is_empty() { BranchAssignment::empty() } else { snap_branch_points(&complex, &crit)? };
    if let (Verdict::Violation(w), _) = verify_on_lattice(&complex, &branch) {
        return Err(MeshFailure::Branch(w));
    }

    let nf = f64::from(n);
    let boundary: Vec<BoundaryDatum> = complex
        .boundary_vertices()
        .into_iter()
        .map(|v| {
            let nearest = spec.domain.closest_boundary_point(complex.pos(v));
            BoundaryDatum { vertex: v, nearest, lambda: spec.lambda.at(&nearest) }
        })
        .collect();
    let rho: Vec<f64> = boundary.iter().map(|b| b.lambda / nf).collect();

    let solved = PackingSolution::solve(Arc::clone(&complex), &rho, branch.clone(), &spec.solver)?;
    let normalized = normalize(&solved, Complex64::new(0.0, 0.0), xi)?;
    Ok(MeshRun { n, complex, branch, boundary, map: CpMap::new(normalized), elapsed: start.elapsed() })
}

/// Runs every mesh of the problem (concurrently); results are ordered by `n`.
pub fn run_pipeline(spec: &ProblemSpec) -> Vec<MeshOutcome> {
    run_meshes(spec, &spec.meshes)
}

pub fn run_meshes(spec: &ProblemSpec, meshes: &[u32]) -> Vec<MeshOutcome> {
    let mut out: Vec<MeshOutcome> = meshes.par_iter().map(|&n| MeshOutcome { n, result: run_mesh(spec, n) }).collect();
    out.sort_by_key(|o| o.n);
    out
}
