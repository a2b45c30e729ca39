use num_complex::Complex64;

/// Finite Blaschke product `c ∏ ((z − x_i)/(1 − x̄_i z))^{k_i}`.
pub fn blaschke(z: Complex64, crit: &[(Complex64, u32)], c: Complex64) -> Complex64 {
    crit.iter().fold(c, |acc, &(x, k)| {
        let factor = (z - x) / (Complex64::new(1.0, 0.0) - x.conj() * z);
        acc * factor.powu(k)
    })
}
