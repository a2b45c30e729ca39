use crate::complex::TriComplex;

/// Angle at the centre of the `r_v` circle in the triangle formed by the
/// centres of three mutually tangent circles of radii `r_v, r_u, r_w`.
///
/// Uses the half-angle form of the law of cosines, which stays accurate for
/// angles close to 0 or π where `acos` loses half the digits.
pub fn tri_angle(r_v: f64, r_u: f64, r_w: f64) -> f64 {
    2.0 * (r_u * r_w / (r_v * (r_v + r_u + r_w))).sqrt().atan()
}

/// Angle sum `Θ(v)` of an interior vertex.
pub fn angle_sum(complex: &TriComplex, radii: &[f64], v: usize) -> f64 {
    complex
        .petals(v)
        .map(|(u, w)| tri_angle(radii[v], radii[u], radii[w]))
        .sum()
}

/// `Θ` at trial radius `x` and its derivative with respect to `ln x`.
fn sum_and_slope(x: f64, petals: &[(f64, f64)]) -> (f64, f64) {
    let mut theta = 0.0;
    let mut slope = 0.0;
    for &(u, w) in petals {
        let s = x + u + w;
        let q = u * w / (x * s);
        let sq = q.sqrt();
        theta += 2.0 * sq.atan();
        slope -= sq / (1.0 + q) * (2.0 * x + u + w) / s;
    }
    (theta, slope)
}

/// Largest angle sum any radius can produce: each petal contributes less than π.
pub(crate) fn angle_sum_supremum(petal_count: usize) -> f64 {
    petal_count as f64 * std::f64::consts::PI
}

/// Radius for which the angle sum with the given petal radii equals `target`.
///
/// `Θ` is strictly decreasing in the radius, so the root is bracketed first and
/// then refined by Newton steps in `ln r` that fall back to bisection whenever a
/// step leaves the bracket.
pub(crate) fn solve_vertex_radius(petals: &[(f64, f64)], target: f64, guess: f64) -> f64 {
    debug_assert!(target > 0.0 && target < angle_sum_supremum(petals.len()));
    let excess = |t: f64| sum_and_slope(t.exp(), petals).0 - target;

    let t0 = guess.ln();
    let f0 = excess(t0);
    if f0 == 0.0 {
        return guess;
    }
    let (mut lo, mut hi);
    let mut step = 0.5;
    if f0 > 0.0 {
        lo = t0;
        hi = t0 + step;
        while excess(hi) > 0.0 {
            lo = hi;
            step *= 2.0;
            hi = t0 + step;
        }
    } else {
        hi = t0;
        lo = t0 - step;
        while excess(lo) < 0.0 {
            hi = lo;
            step *= 2.0;
            lo = t0 - step;
        }
    }

    let mut t = if f0 > 0.0 { lo } else { hi };
    for _ in 0..200 {
        let (theta, slope) = sum_and_slope(t.exp(), petals);
        let g = theta - target;
        if g == 0.0 {
            break;
        }
        if g > 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        if hi - lo <= 4.0 * f64::EPSILON * (1.0 + t.abs()) {
            break;
        }
        let mut next = t - g / slope;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - t).abs() <= f64::EPSILON * (1.0 + t.abs()) {
            t = next;
            break;
        }
        t = next;
    }
    t.exp()
}
