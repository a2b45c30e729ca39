//! Patches of the regular hexagonal triangulation `ℍ_n`.
//!
//! The lattice has vertices `(2k + l(1 + √3 i)) / n` for integer `k, l`; every
//! vertex has six neighbours and every edge has length `2/n`. A [`TriComplex`]
//! is a finite, simply connected set of lattice faces with its vertex fans.

mod domain;
mod snap;

use std::collections::{BTreeSet, HashMap};

use num_complex::Complex64;
use thiserror::Error;

pub use domain::{BoundaryPoint, DomainError, DomainSpec};
pub use snap::{snap_branch_points, BranchAssignment, SnapError};

/// Tolerance for geometric predicates on coordinates of magnitude one.
pub const GEOM_TOL: f64 = 1e-12;

pub(crate) const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Axial offsets of the six lattice neighbours, counter-clockwise from `+x`.
pub const HEX_DIRECTIONS: [(i64, i64); 6] = [(1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1)];

/// Position of lattice vertex `(k, l)` in `ℍ_n`.
pub fn lattice_point(k: i64, l: i64, n: u32) -> Complex64 {
    let n = f64::from(n);
    Complex64::new((2 * k + l) as f64 / n, l as f64 * SQRT_3 / n)
}

/// Real lattice coordinates `(k, l)` of a point, inverse of [`lattice_point`].
pub fn lattice_coords(z: Complex64, n: u32) -> (f64, f64) {
    let n = f64::from(n);
    let l = z.im * n / SQRT_3;
    let k = (z.re * n - l) / 2.0;
    (k, l)
}

/// Hexagonal (graph) distance between two lattice vertices.
pub fn hex_distance(a: (i64, i64), b: (i64, i64)) -> i64 {
    let dk = a.0 - b.0;
    let dl = a.1 - b.1;
    (dk.abs() + dl.abs() + (dk + dl).abs()) / 2
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeVertex {
    pub k: i64,
    pub l: i64,
    pub pos: Complex64,
}

impl LatticeVertex {
    pub fn new(k: i64, l: i64, n: u32) -> Self {
        Self { k, l, pos: lattice_point(k, l, n) }
    }
}

/// A lattice triangle, identified by the unit cell `(k, l)` it sits in.
///
/// The upper triangle of a cell is `(k,l), (k+1,l), (k,l+1)`; the lower one is
/// `(k+1,l), (k+1,l+1), (k,l+1)`. Both are listed counter-clockwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FaceCell {
    pub l: i64,
    pub k: i64,
    pub upper: bool,
}

impl FaceCell {
    pub fn upper(k: i64, l: i64) -> Self {
        Self { k, l, upper: true }
    }

    pub fn lower(k: i64, l: i64) -> Self {
        Self { k, l, upper: false }
    }

    pub fn corners(&self) -> [(i64, i64); 3] {
        let (k, l) = (self.k, self.l);
        if self.upper {
            [(k, l), (k + 1, l), (k, l + 1)]
        } else {
            [(k + 1, l), (k + 1, l + 1), (k, l + 1)]
        }
    }

    /// The six cells around lattice vertex `(k, l)`.
    pub fn around_vertex(k: i64, l: i64) -> [FaceCell; 6] {
        [
            FaceCell::upper(k, l),
            FaceCell::lower(k - 1, l),
            FaceCell::upper(k - 1, l),
            FaceCell::lower(k - 1, l - 1),
            FaceCell::upper(k, l - 1),
            FaceCell::lower(k, l - 1),
        ]
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ComplexError {
    #[error("complex has no faces")]
    Empty,
    #[error("complex is not connected")]
    Disconnected,
    #[error("vertex ({k},{l}) is not a manifold point (its faces do not form one fan)")]
    NonManifold { k: i64, l: i64 },
    #[error("complex is not simply connected (V - E + F = {euler})")]
    NotSimplyConnected { euler: i64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BuildError {
    #[error("invalid domain: {0}")]
    Domain(#[from] DomainError),
    #[error("mesh too coarse: {0}")]
    MeshTooCoarse(String),
}

/// Oriented, simply connected patch of the hexagonal lattice. Immutable once built.
#[derive(Clone, Debug)]
pub struct TriComplex {
    mesh_n: u32,
    vertices: Vec<LatticeVertex>,
    faces: Vec<[usize; 3]>,
    cells: Vec<FaceCell>,
    neighbors: Vec<Vec<usize>>,
    fans: Vec<Vec<usize>>,
    boundary: Vec<bool>,
    edges: Vec<(usize, usize)>,
    vertex_index: HashMap<(i64, i64), usize>,
    face_index: HashMap<FaceCell, usize>,
}

impl TriComplex {
    /// Assemble a complex from lattice cells, checking that the result is a
    /// connected, simply connected triangulated disk.
    pub fn from_cells<I>(n: u32, cells: I) -> Result<Self, ComplexError>
    where
        I: IntoIterator<Item = FaceCell>,
    {
        assert!(n >= 1, "mesh parameter must be positive");
        let cells: Vec<FaceCell> = cells.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        if cells.is_empty() {
            return Err(ComplexError::Empty);
        }

        let mut coords: Vec<(i64, i64)> = cells.iter().flat_map(|c| c.corners()).collect();
        coords.sort_by_key(|&(k, l)| (l, k));
        coords.dedup();
        let vertex_index: HashMap<(i64, i64), usize> =
            coords.iter().enumerate().map(|(i, &kl)| (kl, i)).collect();
        let vertices: Vec<LatticeVertex> =
            coords.iter().map(|&(k, l)| LatticeVertex::new(k, l, n)).collect();

        let faces: Vec<[usize; 3]> = cells
            .iter()
            .map(|c| c.corners().map(|kl| vertex_index[&kl]))
            .collect();
        let face_index: HashMap<FaceCell, usize> =
            cells.iter().enumerate().map(|(i, &c)| (c, i)).collect();

        let mut edge_count: HashMap<(usize, usize), usize> = HashMap::new();
        for f in &faces {
            for i in 0..3 {
                let (a, b) = (f[i], f[(i + 1) % 3]);
                *edge_count.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        let mut edges: Vec<(usize, usize)> = edge_count.keys().copied().collect();
        edges.sort_unstable();

        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); vertices.len()];
        for (fi, f) in faces.iter().enumerate() {
            for &v in f {
                incident[v].push(fi);
            }
        }

        let mut neighbors = Vec::with_capacity(vertices.len());
        let mut fans = Vec::with_capacity(vertices.len());
        let mut boundary = Vec::with_capacity(vertices.len());
        for (v, inc) in incident.iter().enumerate() {
            let (nbrs, fan, closed) = order_fan(v, inc, &faces).ok_or(ComplexError::NonManifold {
                k: vertices[v].k,
                l: vertices[v].l,
            })?;
            neighbors.push(nbrs);
            fans.push(fan);
            boundary.push(!closed);
        }

        let complex = Self {
            mesh_n: n,
            vertices,
            faces,
            cells,
            neighbors,
            fans,
            boundary,
            edges,
            vertex_index,
            face_index,
        };
        if !complex.is_connected() {
            return Err(ComplexError::Disconnected);
        }
        let euler = complex.euler_characteristic();
        if euler != 1 {
            return Err(ComplexError::NotSimplyConnected { euler });
        }
        Ok(complex)
    }

    /// All lattice faces whose vertices lie within hexagonal distance
    /// `generations` of `center`. Needs `generations ≥ 1`.
    pub fn hex_patch(n: u32, center: (i64, i64), generations: u32) -> Self {
        let g = i64::from(generations);
        let inside = |kl: (i64, i64)| hex_distance(kl, center) <= g;
        let mut cells = Vec::new();
        for l in center.1 - g - 1..=center.1 + g {
            for k in center.0 - g - 1..=center.0 + g {
                for cell in [FaceCell::upper(k, l), FaceCell::lower(k, l)] {
                    if cell.corners().iter().all(|&kl| inside(kl)) {
                        cells.push(cell);
                    }
                }
            }
        }
        Self::from_cells(n, cells).expect("hexagonal patches are topological disks")
    }

    pub fn mesh_n(&self) -> u32 {
        self.mesh_n
    }

    /// Edge length `2/n` of the lattice.
    pub fn edge_length(&self) -> f64 {
        2.0 / f64::from(self.mesh_n)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[LatticeVertex] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> &LatticeVertex {
        &self.vertices[v]
    }

    pub fn pos(&self, v: usize) -> Complex64 {
        self.vertices[v].pos
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn cells(&self) -> &[FaceCell] {
        &self.cells
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Neighbours of `v` in counter-clockwise order. For an interior vertex the
    /// list is cyclic; for a boundary vertex it runs from one boundary edge to
    /// the other.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    /// Faces around `v`, counter-clockwise, aligned with [`Self::neighbors`].
    pub fn fan(&self, v: usize) -> &[usize] {
        &self.fans[v]
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary[v]
    }

    pub fn is_interior(&self, v: usize) -> bool {
        !self.boundary[v]
    }

    pub fn boundary_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| self.boundary[v]).collect()
    }

    pub fn interior_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| !self.boundary[v]).collect()
    }

    /// Petal pairs `(u, w)` of `v`: consecutive neighbours spanning a face `⟨v,u,w⟩`.
    pub fn petals(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let nb = &self.neighbors[v];
        let closed = !self.boundary[v];
        let count = if closed { nb.len() } else { nb.len() - 1 };
        (0..count).map(move |i| (nb[i], nb[(i + 1) % nb.len()]))
    }

    pub fn vertex_at(&self, k: i64, l: i64) -> Option<usize> {
        self.vertex_index.get(&(k, l)).copied()
    }

    pub fn face_of_cell(&self, cell: FaceCell) -> Option<usize> {
        self.face_index.get(&cell).copied()
    }

    /// Edges that belong to exactly one face, oriented so the face lies on the left.
    pub fn boundary_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for f in &self.faces {
            for i in 0..3 {
                let (a, b) = (f[i], f[(i + 1) % 3]);
                if self.boundary[a] && self.boundary[b] && self.edge_faces(a, b).len() == 1 {
                    out.push((a, b));
                }
            }
        }
        out.sort_unstable_by_key(|&(a, b)| (a.min(b), a.max(b)));
        out
    }

    /// Faces containing the edge `{a, b}`.
    pub fn edge_faces(&self, a: usize, b: usize) -> Vec<usize> {
        self.fans[a]
            .iter()
            .copied()
            .filter(|&f| self.faces[f].contains(&b))
            .collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    pub fn signed_area(&self, f: usize) -> f64 {
        let [a, b, c] = self.faces[f].map(|v| self.pos(v));
        0.5 * ((b - a).conj() * (c - a)).im
    }

    /// Total area of the carrier.
    pub fn carrier_area(&self) -> f64 {
        (0..self.faces.len()).map(|f| self.signed_area(f)).sum()
    }

    /// Multi-source breadth-first graph distance from `sources` to every vertex.
    pub fn graph_distances(&self, sources: &[usize]) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertices.len()];
        let mut queue = std::collections::VecDeque::new();
        for &s in sources {
            if dist[s] != 0 {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            for &u in &self.neighbors[v] {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    fn is_connected(&self) -> bool {
        self.graph_distances(&[0]).iter().all(|&d| d != usize::MAX)
    }
}

/// Orders the faces around `v` into a single fan. Returns the ccw neighbour
/// list, the ccw face list and whether the fan closes up.
fn order_fan(v: usize, incident: &[usize], faces: &[[usize; 3]]) -> Option<(Vec<usize>, Vec<usize>, bool)> {
    // For each incident face ⟨v, a, b⟩ (ccw), the fan steps from a to b.
    let steps: Vec<(usize, usize, usize)> = incident
        .iter()
        .map(|&f| {
            let t = faces[f];
            let i = t.iter().position(|&x| x == v).unwrap();
            (t[(i + 1) % 3], t[(i + 2) % 3], f)
        })
        .collect();
    let start = steps
        .iter()
        .position(|&(a, _, _)| !steps.iter().any(|&(_, b, _)| b == a))
        .unwrap_or(0);
    let closed_candidate = steps.iter().all(|&(a, _, _)| steps.iter().any(|&(_, b, _)| b == a));

    let mut nbrs = vec![steps[start].0];
    let mut fan = Vec::with_capacity(steps.len());
    let mut cur = start;
    loop {
        let (_, b, f) = steps[cur];
        fan.push(f);
        match steps.iter().position(|&(a, _, _)| a == b) {
            Some(next) if !fan.contains(&steps[next].2) => {
                nbrs.push(b);
                cur = next;
            }
            Some(_) => {
                // wrapped around to the first face
                break;
            }
            None => {
                nbrs.push(b);
                break;
            }
        }
    }
    if fan.len() != steps.len() {
        return None;
    }
    Some((nbrs, fan, closed_candidate))
}

/// Maximal complete subcomplex of `ℍ_n` in the domain: every lattice face whose
/// closed triangle lies in the domain, restricted to the component around the
/// origin. The normalisation point `xi` must lie in its carrier.
pub fn build_subcomplex(domain: &DomainSpec, xi: Complex64, n: u32) -> Result<TriComplex, BuildError> {
    if n == 0 {
        return Err(BuildError::MeshTooCoarse("mesh parameter must be positive".into()));
    }
    domain.validate(xi)?;

    let (lo, hi) = domain.bounding_box();
    let nf = f64::from(n);
    let l_min = (lo.im * nf / SQRT_3).floor() as i64 - 1;
    let l_max = (hi.im * nf / SQRT_3).ceil() as i64 + 1;

    let mut inside_cache: HashMap<(i64, i64), bool> = HashMap::new();
    let mut vertex_inside = |kl: (i64, i64)| {
        *inside_cache
            .entry(kl)
            .or_insert_with(|| domain.contains_strict(lattice_point(kl.0, kl.1, n)))
    };

    let mut accepted: BTreeSet<FaceCell> = BTreeSet::new();
    for l in l_min..=l_max {
        let k_min = ((lo.re * nf - l as f64) / 2.0).floor() as i64 - 1;
        let k_max = ((hi.re * nf - l as f64) / 2.0).ceil() as i64 + 1;
        for k in k_min..=k_max {
            for cell in [FaceCell::upper(k, l), FaceCell::lower(k, l)] {
                let corners = cell.corners();
                if !corners.iter().all(|&kl| vertex_inside(kl)) {
                    continue;
                }
                let tri = corners.map(|(k, l)| lattice_point(k, l, n));
                if domain.contains_closed_triangle(tri) {
                    accepted.insert(cell);
                }
            }
        }
    }

    let component = origin_component(&accepted).ok_or_else(|| {
        BuildError::MeshTooCoarse(format!("no lattice face at n = {n} fits in the domain next to 0"))
    })?;
    let complex = TriComplex::from_cells(n, component)
        .map_err(|e| BuildError::MeshTooCoarse(format!("n = {n}: {e}")))?;

    if crate::cpmap::locate_in_complex(&complex, xi).is_err() {
        return Err(BuildError::MeshTooCoarse(format!(
            "normalisation point {xi} is outside the carrier at n = {n}"
        )));
    }
    Ok(complex)
}

/// Edge-connected component of `cells` containing the lowest face around the origin vertex.
fn origin_component(cells: &BTreeSet<FaceCell>) -> Option<Vec<FaceCell>> {
    let seed = FaceCell::around_vertex(0, 0)
        .into_iter()
        .filter(|c| cells.contains(c))
        .min()?;

    let mut seen: BTreeSet<FaceCell> = BTreeSet::new();
    let mut stack = vec![seed];
    seen.insert(seed);
    while let Some(c) = stack.pop() {
        for nb in edge_neighbors(c) {
            if cells.contains(&nb) && seen.insert(nb) {
                stack.push(nb);
            }
        }
    }
    Some(seen.into_iter().collect())
}

/// The three cells sharing an edge with `c`.
fn edge_neighbors(c: FaceCell) -> [FaceCell; 3] {
    let (k, l) = (c.k, c.l);
    if c.upper {
        [FaceCell::lower(k, l), FaceCell::lower(k - 1, l), FaceCell::lower(k, l - 1)]
    } else {
        [FaceCell::upper(k, l), FaceCell::upper(k + 1, l), FaceCell::upper(k, l + 1)]
    }
}
