use std::f64::consts::TAU;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{BoundaryPoint, DomainError, DomainSpec};
use crate::solver::{SolveError, SolverConfig};

/// Boundary modulus `λ`. Tables are equally spaced over one period of the
/// chosen parameter and interpolated linearly, periodically.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LambdaSpec {
    Constant(f64),
    /// Samples at polar angles `2πj/m`, about the disk centre or the origin.
    Angle(Vec<f64>),
    /// Samples at arclength fractions `j/m` of the boundary traversal.
    Arclength(Vec<f64>),
}

impl LambdaSpec {
    pub fn at(&self, b: &BoundaryPoint) -> f64 {
        match self {
            LambdaSpec::Constant(c) => *c,
            LambdaSpec::Angle(t) => periodic_lerp(t, b.angle / TAU),
            LambdaSpec::Arclength(t) => periodic_lerp(t, b.arclength),
        }
    }

    fn samples(&self) -> &[f64] {
        match self {
            LambdaSpec::Constant(c) => std::slice::from_ref(c),
            LambdaSpec::Angle(t) | LambdaSpec::Arclength(t) => t,
        }
    }

    pub fn max(&self) -> f64 {
        self.samples().iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

fn periodic_lerp(table: &[f64], x: f64) -> f64 {
    let m = table.len();
    let pos = x.rem_euclid(1.0) * m as f64;
    let j = (pos.floor() as usize).min(m - 1);
    let frac = pos - j as f64;
    table[j] * (1.0 - frac) + table[(j + 1) % m] * frac
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CritPoint {
    pub point: Complex64,
    pub order: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Output {
    Radii,
    Report,
    Svg,
}

fn default_outputs() -> Vec<Output> {
    vec![Output::Radii, Output::Report, Output::Svg]
}

/// Everything the construction needs: the domain, `λ`, the critical set, `ξ`
/// and the meshes to run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub domain: DomainSpec,
    pub lambda: LambdaSpec,
    #[serde(default)]
    pub crit: Vec<CritPoint>,
    pub xi: f64,
    pub meshes: Vec<u32>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<Output>,
    /// Radius of the probe disk around 0; half the distance to the boundary if absent.
    #[serde(default)]
    pub probe_radius: Option<f64>,
}

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed problem file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("domain: {0}")]
    Domain(#[from] DomainError),
    #[error("solver: {0}")]
    Solver(#[from] SolveError),
    #[error("{0}")]
    Invalid(String),
}

impl ProblemSpec {
    pub fn from_json(text: &str) -> Result<Self, SpecError> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self, SpecError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| SpecError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        self.domain.validate(self.xi_point())?;
        self.solver.validate()?;
        let invalid = |m: String| Err(SpecError::Invalid(m));
        if self.meshes.is_empty() {
            return invalid("meshes must not be empty".into());
        }
        if self.meshes.contains(&0) || self.meshes.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("meshes must be positive and strictly increasing".into());
        }
        let samples = self.lambda.samples();
        if samples.is_empty() || samples.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return invalid("lambda values must be positive and finite".into());
        }
        for c in &self.crit {
            if c.order == 0 {
                return invalid(format!("critical point {} has order 0", c.point));
            }
            if !self.domain.contains_strict(c.point) {
                return invalid(format!("critical point {} is not inside the domain", c.point));
            }
        }
        if let Some(r) = self.probe_radius {
            if !(r > 0.0 && r.is_finite()) {
                return invalid("probe_radius must be positive".into());
            }
        }
        Ok(())
    }

    pub fn xi_point(&self) -> Complex64 {
        Complex64::new(self.xi, 0.0)
    }

    pub fn crit_list(&self) -> Vec<(Complex64, u32)> {
        self.crit.iter().map(|c| (c.point, c.order)).collect()
    }

    pub fn wants(&self, o: Output) -> bool {
        self.outputs.contains(&o)
    }

    /// Radius of the probe disk.
    pub fn probe_radius(&self) -> f64 {
        self.probe_radius
            .unwrap_or_else(|| 0.5 * self.domain.boundary_distance(Complex64::new(0.0, 0.0)))
    }
}
