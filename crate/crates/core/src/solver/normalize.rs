use num_complex::Complex64;

use super::{PackingSolution, SolveError};
use crate::cpmap::locate_in_complex;

/// Moves the packing so that the simplicial map sends `origin` to 0 and `xi`
/// onto the positive real axis.
///
/// Both points are given in the coordinates of the regular source carrier.
pub fn normalize(solution: &PackingSolution, origin: Complex64, xi: Complex64) -> Result<PackingSolution, SolveError> {
    let image = |z: Complex64| -> Result<Complex64, SolveError> {
        let loc = locate_in_complex(&solution.complex, z)
            .map_err(|e| SolveError::NormalizationDegenerate(e.to_string()))?;
        let f = solution.complex.faces()[loc.face];
        Ok((0..3).map(|i| solution.centers[f[i]] * loc.weights[i]).sum())
    };
    let f0 = image(origin)?;
    let fx = image(xi)?;
    let d = fx - f0;
    let scale = solution.radii.as_slice().iter().fold(0.0f64, |m, &r| m.max(r));
    if !(d.norm() > 1e-12 * scale.max(f64::MIN_POSITIVE)) {
        return Err(SolveError::NormalizationDegenerate(format!(
            "image of {xi} coincides with the image of {origin}"
        )));
    }
    let rot = d.conj().unscale(d.norm());
    let mut out = solution.transformed(rot, -rot * f0);
    // the image of xi lies on the axis up to rounding; remove that rounding
    let fx_new = rot * (fx - f0);
    debug_assert!(fx_new.im.abs() <= 1e-12 * fx_new.re.abs().max(1.0));
    out.radii = solution.radii.clone();
    Ok(out)
}
