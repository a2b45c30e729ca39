//! Branched circle-packing boundary-value solver and layout.

mod angle;
mod layout;
mod normalize;
mod radii;

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{BranchAssignment, TriComplex};

pub use angle::{angle_sum, tri_angle};
pub use layout::{layout, tangency_defect, Layout};
pub use normalize::normalize;
pub use radii::{angle_residual, solve_radii, solve_radii_from, target_angle_sums, RadiusFunction, RadiusSolve};

/// Tightest angle tolerance used when polishing radii for layout.
pub const POLISH_FLOOR: f64 = 1e-14;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum SweepOrder {
    /// Interior vertices in index order.
    #[default]
    Natural,
    /// A fresh ChaCha permutation of the interior vertices every sweep.
    Shuffled { seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Absolute angle-sum tolerance in radians.
    pub angle_tol: f64,
    /// Layout tolerance relative to the packing's edge scale `2·mean(boundary radius)`,
    /// which is `2/n` when `λ ≡ 1`.
    pub layout_tol_rel: f64,
    pub max_sweeps: usize,
    /// Over-relaxation factor applied in `ln r`; 1 is plain Gauss–Seidel.
    pub relaxation: f64,
    pub sweep_order: SweepOrder,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            angle_tol: 1e-10,
            layout_tol_rel: 1e-8,
            max_sweeps: 50_000,
            relaxation: 1.0,
            sweep_order: SweepOrder::Natural,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolveError> {
        let bad = |what: &str| Err(SolveError::InvalidConfig(what.to_string()));
        if !(self.angle_tol > 0.0 && self.angle_tol.is_finite()) {
            return bad("angle_tol must be positive");
        }
        if !(self.layout_tol_rel > 0.0 && self.layout_tol_rel.is_finite()) {
            return bad("layout_tol_rel must be positive");
        }
        if !(self.relaxation > 0.0 && self.relaxation < 2.0) {
            return bad("relaxation must lie in (0, 2)");
        }
        Ok(())
    }

    /// Absolute layout tolerance for a mesh with edge length `2/n`.
    pub fn layout_tol(&self, n: u32) -> f64 {
        self.layout_tol_rel * 2.0 / f64::from(n)
    }

    /// Absolute layout tolerance for a packing whose boundary radii average `mean_boundary_radius`.
    /// Scaling the boundary data scales the tolerance with it, so solves stay homogeneous.
    pub fn layout_tol_scaled(&self, mean_boundary_radius: f64) -> f64 {
        self.layout_tol_rel * 2.0 * mean_boundary_radius
    }

    /// [`Self::layout_tol_scaled`] for the boundary radii found in `radii`.
    pub fn layout_tol_for(&self, complex: &TriComplex, radii: &[f64]) -> f64 {
        let bd = complex.boundary_vertices();
        self.layout_tol_scaled(bd.iter().map(|&v| radii[v]).sum::<f64>() / bd.len() as f64)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("invalid solver config: {0}")]
    InvalidConfig(String),
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("radius at vertex {vertex} is not a positive finite number")]
    NonPositiveRadius { vertex: usize },
    #[error("vertex {vertex}: angle sum {target} is unreachable (supremum {supremum})")]
    UnattainableAngleSum { vertex: usize, target: f64, supremum: f64 },
    #[error("no convergence after {sweeps} sweeps (residual {residual:e})")]
    NonConvergence { sweeps: usize, residual: f64 },
    #[error("circle at vertex {vertex} collapsed (radius {radius:e})")]
    Degenerate { vertex: usize, radius: f64 },
    #[error("layout inconsistent: defect {defect:e} exceeds {tol:e}")]
    LayoutInconsistent { defect: f64, tol: f64 },
    #[error("normalisation degenerate: {0}")]
    NormalizationDegenerate(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Residuals {
    pub angle_sum: f64,
    pub tangency: f64,
    pub layout_closure: f64,
}

/// Radii and centres of a (possibly branched) packing of a complex.
#[derive(Clone, Debug)]
pub struct PackingSolution {
    pub complex: Arc<TriComplex>,
    pub radii: RadiusFunction,
    pub centers: Vec<Complex64>,
    pub branch: BranchAssignment,
    pub residuals: Residuals,
    pub sweeps: usize,
}

impl PackingSolution {
    /// The regular packing: radii `1/n`, centres at the lattice positions.
    pub fn regular(complex: Arc<TriComplex>) -> Self {
        let r = 1.0 / f64::from(complex.mesh_n());
        let radii = RadiusFunction(vec![r; complex.vertex_count()]);
        let centers: Vec<Complex64> = (0..complex.vertex_count()).map(|v| complex.pos(v)).collect();
        let tangency = tangency_defect(&complex, radii.as_slice(), &centers);
        let targets = target_angle_sums(&complex, &BranchAssignment::empty());
        let angle = angle_residual(&complex, radii.as_slice(), &targets);
        Self {
            complex,
            radii,
            centers,
            branch: BranchAssignment::empty(),
            residuals: Residuals { angle_sum: angle, tangency, layout_closure: tangency },
            sweeps: 0,
        }
    }

    /// Solves for radii with the given boundary data, then lays out the centres.
    ///
    /// Angle errors add up as holonomy around interior loops, so on large
    /// meshes a solve that meets `angle_tol` can still miss the layout
    /// tolerance. In that case the radii are polished with a tighter angle
    /// tolerance (down to [`POLISH_FLOOR`]) before giving up.
    pub fn solve(
        complex: Arc<TriComplex>,
        boundary_radii: &[f64],
        branch: BranchAssignment,
        config: &SolverConfig,
    ) -> Result<Self, SolveError> {
        let mut solved = solve_radii(&complex, boundary_radii, &branch, config)?;
        let mut cfg = config.clone();
        loop {
            match layout(&complex, &solved.radii, config.layout_tol_for(&complex, solved.radii.as_slice())) {
                Err(SolveError::LayoutInconsistent { .. }) if cfg.angle_tol > POLISH_FLOOR => {
                    cfg.angle_tol = (cfg.angle_tol * 1e-2).max(POLISH_FLOOR);
                    let spent = solved.sweeps;
                    cfg.max_sweeps = config.max_sweeps.saturating_sub(spent);
                    solved = solve_radii_from(&complex, boundary_radii, &branch, &cfg, solved.radii.as_slice())?;
                    solved.sweeps += spent;
                }
                placed => return Ok(Self::assemble(complex, solved, branch, placed?)),
            }
        }
    }

    pub fn from_radii(
        complex: Arc<TriComplex>,
        solved: RadiusSolve,
        branch: BranchAssignment,
        config: &SolverConfig,
    ) -> Result<Self, SolveError> {
        let placed = layout(&complex, &solved.radii, config.layout_tol_for(&complex, solved.radii.as_slice()))?;
        Ok(Self::assemble(complex, solved, branch, placed))
    }

    fn assemble(complex: Arc<TriComplex>, solved: RadiusSolve, branch: BranchAssignment, placed: Layout) -> Self {
        Self {
            complex,
            radii: solved.radii,
            centers: placed.centers,
            branch,
            residuals: Residuals {
                angle_sum: solved.residual,
                tangency: placed.tangency_defect,
                layout_closure: placed.closure_defect,
            },
            sweeps: solved.sweeps,
        }
    }

    /// Applies `w ↦ a·w + b` to the centres (`|a|` also scales the radii).
    pub fn transformed(&self, a: Complex64, b: Complex64) -> Self {
        let s = a.norm();
        let mut out = self.clone();
        out.centers = self.centers.iter().map(|&c| a * c + b).collect();
        out.radii = self.radii.scaled(s);
        out.residuals.tangency *= s;
        out.residuals.layout_closure *= s;
        out
    }

    /// Turning of the image fan of an interior vertex around its centre,
    /// `2π(1 + k_v)` for a correctly branched packing.
    pub fn fan_turning(&self, v: usize) -> f64 {
        let c = self.centers[v];
        self.complex
            .petals(v)
            .map(|(u, w)| ((self.centers[w] - c) / (self.centers[u] - c)).arg())
            .sum()
    }
}
