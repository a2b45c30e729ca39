use num_complex::Complex64;
use rustfft::FftPlanner;

use super::OracleError;

/// Tail bound below which the power series of `h` is truncated.
const TAIL_TOL: f64 = 1e-10;

/// Power series of the analytic function `h` with `Re h = log λ` on the unit
/// circle and `Im h(0) = 0`.
#[derive(Clone, Debug)]
pub struct HarmonicSeries {
    coeffs: Vec<Complex64>,
    /// `suffix_max[j] = max_{i ≥ j} |c_i|`
    suffix_max: Vec<f64>,
}

/// Builds `h` from `M` equally spaced samples `λ(e^{2πij/M})`.
pub fn analytic_completion(lambda_samples: &[f64]) -> Result<HarmonicSeries, OracleError> {
    let m = lambda_samples.len();
    if m < 64 || !m.is_power_of_two() {
        return Err(OracleError::BadSampleCount(m));
    }
    if let Some(j) = lambda_samples.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(OracleError::NonPositiveLambda(j));
    }
    let mut buf: Vec<Complex64> = lambda_samples.iter().map(|&x| Complex64::new(x.ln(), 0.0)).collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);

    let mf = m as f64;
    let half = m / 2;
    let mut coeffs = Vec::with_capacity(half + 1);
    coeffs.push(Complex64::new(buf[0].re / mf, 0.0));
    for x in &buf[1..half] {
        coeffs.push(x * (2.0 / mf));
    }
    coeffs.push(Complex64::new(buf[half].re / mf, 0.0));

    let mut suffix_max = vec![0.0f64; coeffs.len() + 1];
    for j in (0..coeffs.len()).rev() {
        suffix_max[j] = suffix_max[j + 1].max(coeffs[j].norm());
    }
    Ok(HarmonicSeries { coeffs, suffix_max })
}

impl HarmonicSeries {
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Number of terms needed at radius `r < 1` for the tail to fall below 1e−10.
    pub fn terms_needed(&self, r: f64) -> usize {
        let n = self.coeffs.len();
        if r >= 1.0 {
            return n;
        }
        let mut rp = 1.0;
        for j in 0..n {
            // bound on Σ_{i ≥ j} |c_i| r^i
            if self.suffix_max[j] * rp / (1.0 - r) < TAIL_TOL {
                return j;
            }
            rp *= r;
        }
        n
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let terms = self.terms_needed(z.norm());
        self.coeffs[..terms].iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }
}
