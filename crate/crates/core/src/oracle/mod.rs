//! Exact target function on the unit disk for a prescribed boundary modulus
//! and critical set: `F(z) = c ∫₀^z B(η) e^{h(η)} dη`.

mod blaschke;
mod fourier;
mod quadrature;

use std::f64::consts::TAU;

use num_complex::Complex64;
use thiserror::Error;

pub use blaschke::blaschke;
pub use fourier::{analytic_completion, HarmonicSeries};
pub use quadrature::integrate;

/// Absolute tolerance of the path integral.
pub const QUAD_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("need a power of two ≥ 64 boundary samples, got {0}")]
    BadSampleCount(usize),
    #[error("boundary sample {0} is not positive")]
    NonPositiveLambda(usize),
    #[error("critical point {0} is not inside the unit disk")]
    CriticalPointOutside(Complex64),
    #[error("normalisation point must lie in (0, 1) and avoid the critical set, got {0}")]
    BadXi(f64),
    #[error("point {0} is not inside the unit disk")]
    OutsideDisk(Complex64),
    #[error("quadrature did not reach tolerance at {0}")]
    QuadratureFailure(Complex64),
}

/// Boundary modulus, critical set and normalisation point on the unit disk.
#[derive(Clone, Debug)]
pub struct DiskProblem {
    h: HarmonicSeries,
    crit: Vec<(Complex64, u32)>,
    xi: f64,
    /// Unimodular constant making `F(ξ) > 0`.
    c: Complex64,
}

impl DiskProblem {
    /// `lambda_samples[j] = λ(e^{2πij/M})`.
    pub fn new(lambda_samples: &[f64], crit: Vec<(Complex64, u32)>, xi: f64) -> Result<Self, OracleError> {
        let h = analytic_completion(lambda_samples)?;
        for &(x, _) in &crit {
            if !(x.norm() < 1.0) {
                return Err(OracleError::CriticalPointOutside(x));
            }
        }
        if !(xi > 0.0 && xi < 1.0) || crit.iter().any(|&(x, _)| x == Complex64::new(xi, 0.0)) {
            return Err(OracleError::BadXi(xi));
        }
        let crit: Vec<(Complex64, u32)> = crit.into_iter().filter(|&(_, k)| k > 0).collect();
        let mut p = Self { h, crit, xi, c: Complex64::new(1.0, 0.0) };
        let f1 = p.eval(Complex64::new(xi, 0.0))?;
        if !(f1.norm() > 0.0) {
            return Err(OracleError::BadXi(xi));
        }
        p.c = f1.conj() / f1.norm();
        Ok(p)
    }

    /// Samples `λ` at `m` equally spaced angles.
    pub fn from_fn(lambda: impl Fn(f64) -> f64, m: usize, crit: Vec<(Complex64, u32)>, xi: f64) -> Result<Self, OracleError> {
        let samples: Vec<f64> = (0..m).map(|j| lambda(TAU * j as f64 / m as f64)).collect();
        Self::new(&samples, crit, xi)
    }

    pub fn constant(lambda: f64, crit: Vec<(Complex64, u32)>, xi: f64) -> Result<Self, OracleError> {
        Self::from_fn(|_| lambda, 64, crit, xi)
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn critical_points(&self) -> &[(Complex64, u32)] {
        &self.crit
    }

    pub fn unimodular_constant(&self) -> Complex64 {
        self.c
    }

    pub fn harmonic(&self) -> &HarmonicSeries {
        &self.h
    }

    /// `u(z) = Re h(z)`, the harmonic extension of `log λ`.
    pub fn u(&self, z: Complex64) -> f64 {
        self.h.eval(z).re
    }

    /// `F′(z) = c·B(z)·e^{h(z)}`.
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        blaschke(z, &self.crit, self.c) * self.h.eval(z).exp()
    }

    /// `|F′(z)| = |B(z)|·e^{u(z)}`.
    pub fn abs_derivative(&self, z: Complex64) -> f64 {
        blaschke(z, &self.crit, Complex64::new(1.0, 0.0)).norm() * self.u(z).exp()
    }

    /// `F(z)`, integrated along the segment from 0.
    pub fn eval(&self, z: Complex64) -> Result<Complex64, OracleError> {
        if !(z.norm() < 1.0) {
            return Err(OracleError::OutsideDisk(z));
        }
        if z == Complex64::new(0.0, 0.0) {
            return Ok(z);
        }
        let tol = QUAD_TOL / z.norm();
        let integral = integrate(|t| self.derivative(z * t), 0.0, 1.0, tol).ok_or(OracleError::QuadratureFailure(z))?;
        Ok(z * integral)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const O: Complex64 = Complex64::new(0.0, 0.0);

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity() {
        let p = DiskProblem::constant(1.0, vec![], 0.5).unwrap();
        for z in [c(0.3, 0.1), c(-0.6, 0.2), c(0.0, -0.9)] {
            assert!((p.eval(z).unwrap() - z).norm() < 1e-12);
        }
        assert_eq!(p.eval(O).unwrap(), O);
    }

    #[test]
    fn half_square() {
        let p = DiskProblem::constant(1.0, vec![(O, 1)], 0.5).unwrap();
        for z in [c(0.3, 0.1), c(-0.6, 0.2), c(0.0, -0.9)] {
            assert!((p.eval(z).unwrap() - z * z / 2.0).norm() < 1e-12);
        }
    }

    #[test]
    fn gauge_rotates_into_positive_axis() {
        let p = DiskProblem::from_fn(|t| (0.4 * t.sin()).exp() * 1.2, 256, vec![(c(0.1, 0.3), 1)], 0.6).unwrap();
        let f = p.eval(c(0.6, 0.0)).unwrap();
        assert!(f.im.abs() < 1e-10 && f.re > 0.0);
        assert!((p.unimodular_constant().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn derivative_by_finite_differences() {
        let p = DiskProblem::from_fn(|t| 1.4 + 0.3 * t.cos(), 1024, vec![(c(0.3, 0.0), 1), (c(-0.2, 0.4), 2)], 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let z = Complex64::from_polar(rng.gen_range(0.0..0.8), rng.gen_range(0.0..TAU));
            let d = 1e-4;
            let fd = (p.eval(z + d).unwrap() - p.eval(z - d).unwrap()) / (2.0 * d);
            let exact = p.abs_derivative(z);
            assert!((fd.norm() - exact).abs() <= 1e-6 * exact.max(1e-3), "{z}: {} vs {exact}", fd.norm());
        }
    }

    #[test]
    fn critical_points_vanish() {
        let x = c(-0.2, 0.4);
        let p = DiskProblem::constant(1.4, vec![(c(0.3, 0.0), 1), (x, 2)], 0.5).unwrap();
        assert!(p.derivative(c(0.3, 0.0)).norm() < 1e-12);
        assert!(p.derivative(x).norm() < 1e-12);
        // order two: the derivative of F′ vanishes too
        let d = 1e-4;
        let second = (p.derivative(x + d) - p.derivative(x - d)) / (2.0 * d);
        assert!(second.norm() < 1e-6);
    }

    #[test]
    fn boundary_limit() {
        let p = DiskProblem::constant(1.4, vec![(c(0.3, 0.0), 1)], 0.5).unwrap();
        // |B(0.999)| ≈ 0.9981 at θ = 0, so the gap is about 2.6e-3 there
        let worst = (0..360)
            .map(|j| (p.abs_derivative(Complex64::from_polar(0.999, TAU * j as f64 / 360.0)) - 1.4).abs())
            .fold(0.0, f64::max);
        assert!(worst < 5e-3);
        assert!(worst > 1e-3);
    }

    #[test]
    fn validation() {
        assert!(matches!(DiskProblem::constant(1.0, vec![(c(1.0, 0.0), 1)], 0.5), Err(OracleError::CriticalPointOutside(_))));
        assert!(matches!(DiskProblem::constant(1.0, vec![], 1.0), Err(OracleError::BadXi(_))));
        assert!(matches!(DiskProblem::constant(1.0, vec![(c(0.5, 0.0), 1)], 0.5), Err(OracleError::BadXi(_))));
        let p = DiskProblem::constant(1.0, vec![], 0.5).unwrap();
        assert!(matches!(p.eval(c(1.0, 0.0)), Err(OracleError::OutsideDisk(_))));
    }
}
