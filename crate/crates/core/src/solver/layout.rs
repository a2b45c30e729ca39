use std::collections::{HashSet, VecDeque};

use num_complex::Complex64;

use super::angle::tri_angle;
use super::{RadiusFunction, SolveError};
use crate::complex::TriComplex;

#[derive(Clone, Debug)]
pub struct Layout {
    pub centers: Vec<Complex64>,
    /// Max over all edges of `| |c_u − c_w| − (r_u + r_w) |`.
    pub tangency_defect: f64,
    /// Same measure restricted to edges not used while placing centres.
    pub closure_defect: f64,
}

/// Max tangency defect over all edges.
pub fn tangency_defect(complex: &TriComplex, radii: &[f64], centers: &[Complex64]) -> f64 {
    complex
        .edges()
        .iter()
        .map(|&(u, w)| ((centers[u] - centers[w]).norm() - (radii[u] + radii[w])).abs())
        .fold(0.0, f64::max)
}

/// Places circle centres by walking the faces breadth first.
///
/// The root is the lowest boundary edge `(a, b)` with its face on the left:
/// `a` goes to the origin and `b` onto the positive real axis.
pub fn layout(complex: &TriComplex, radii: &RadiusFunction, layout_tol: f64) -> Result<Layout, SolveError> {
    let r = radii.as_slice();
    if r.len() != complex.vertex_count() {
        return Err(SolveError::LengthMismatch { expected: complex.vertex_count(), got: r.len() });
    }
    let faces = complex.faces();
    let (a, b) = complex.boundary_edges()[0];
    let root = complex.edge_faces(a, b)[0];

    let mut centers = vec![Complex64::new(f64::NAN, f64::NAN); complex.vertex_count()];
    let mut placed = vec![false; complex.vertex_count()];
    let mut tree: HashSet<(usize, usize)> = HashSet::new();
    let key = |u: usize, w: usize| (u.min(w), u.max(w));

    centers[a] = Complex64::new(0.0, 0.0);
    centers[b] = Complex64::new(r[a] + r[b], 0.0);
    placed[a] = true;
    placed[b] = true;
    tree.insert(key(a, b));

    let mut seen = vec![false; faces.len()];
    let mut queue = VecDeque::from([root]);
    seen[root] = true;
    while let Some(f) = queue.pop_front() {
        let t = faces[f];
        if let Some(i) = (0..3).find(|&i| !placed[t[(i + 2) % 3]]) {
            let (p, q, s) = (t[i], t[(i + 1) % 3], t[(i + 2) % 3]);
            debug_assert!(placed[p] && placed[q]);
            let dir = (centers[q] - centers[p]).unscale((centers[q] - centers[p]).norm());
            let alpha = tri_angle(r[p], r[q], r[s]);
            centers[s] = centers[p] + dir * Complex64::from_polar(r[p] + r[s], alpha);
            placed[s] = true;
            tree.insert(key(p, s));
            tree.insert(key(q, s));
        }
        for i in 0..3 {
            for g in complex.edge_faces(t[i], t[(i + 1) % 3]) {
                if !seen[g] {
                    seen[g] = true;
                    queue.push_back(g);
                }
            }
        }
    }

    let defect = |&(u, w): &(usize, usize)| ((centers[u] - centers[w]).norm() - (r[u] + r[w])).abs();
    let tangency = complex.edges().iter().map(defect).fold(0.0, f64::max);
    let closure = complex
        .edges()
        .iter()
        .filter(|&&e| !tree.contains(&e))
        .map(defect)
        .fold(0.0, f64::max);
    if !(tangency <= layout_tol) {
        return Err(SolveError::LayoutInconsistent { defect: tangency, tol: layout_tol });
    }
    Ok(Layout { centers, tangency_defect: tangency, closure_defect: closure })
}
