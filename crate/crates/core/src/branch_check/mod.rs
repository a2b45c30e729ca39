//! Exact test of the branch-structure condition `|Γ| ≥ 2ℓ(Γ) + 3`.

mod brute;

use std::collections::VecDeque;

use serde::Serialize;

use crate::complex::{hex_distance, BranchAssignment, TriComplex, GEOM_TOL};

pub use brute::{brute_force_check, BudgetExceeded, CycleCatalog, DEFAULT_NODE_BUDGET};

/// A simple closed edge path that violates the bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleWitness {
    /// Vertex indices in order; the closing edge back to the first is implied.
    pub cycle: Vec<usize>,
    /// Lattice coordinates of `cycle`.
    pub lattice: Vec<(i64, i64)>,
    pub enclosed_weight: u32,
    pub length: usize,
}

impl CycleWitness {
    fn new(complex: &TriComplex, cycle: Vec<usize>, enclosed_weight: u32) -> Self {
        let lattice = cycle.iter().map(|&v| (complex.vertex(v).k, complex.vertex(v).l)).collect();
        let length = cycle.len();
        Self { cycle, lattice, enclosed_weight, length }
    }

    /// `2ℓ + 3 − |Γ|`, positive for a genuine violation.
    pub fn deficit(&self) -> i64 {
        2 * i64::from(self.enclosed_weight) + 3 - self.length as i64
    }

    /// Ordering used to pick one witness: largest deficit, then largest
    /// enclosed weight, then shortest cycle.
    pub fn rank(&self) -> (i64, u32, i64) {
        (self.deficit(), self.enclosed_weight, -(self.length as i64))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Ok,
    Violation(CycleWitness),
}

impl Verdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, Verdict::Ok)
    }

    pub fn witness(&self) -> Option<&CycleWitness> {
        match self {
            Verdict::Ok => None,
            Verdict::Violation(w) => Some(w),
        }
    }
}

/// Slope of the enclosure rays in lattice coordinates. Irrational, so a ray
/// from a lattice vertex never meets another lattice vertex.
const RAY_SLOPE: f64 = 0.618_033_988_749_894_9;

/// Whether the edge `u–w` crosses the ray cast from vertex `s`.
pub(crate) fn ray_crosses(complex: &TriComplex, s: usize, u: usize, w: usize) -> bool {
    let (vs, vu, vw) = (complex.vertex(s), complex.vertex(u), complex.vertex(w));
    let a = (vu.k - vs.k, vu.l - vs.l);
    let b = (vw.k - vs.k, vw.l - vs.l);
    if a == (0, 0) || b == (0, 0) {
        return false;
    }
    // side of the ray's supporting line, sign of cross((1, φ), p)
    let side = |p: (i64, i64)| p.1 as f64 - RAY_SLOPE * p.0 as f64;
    let (sa, sb) = (side(a), side(b));
    if (sa > 0.0) == (sb > 0.0) {
        return false;
    }
    let ab = a.0 * b.1 - a.1 * b.0;
    let e = (b.0 - a.0, b.1 - a.1);
    let de = e.1 as f64 - RAY_SLOPE * e.0 as f64;
    (ab as f64 > 0.0) == (de > 0.0)
}

/// Whether the simple cycle encloses vertex `s` (vertices on the cycle are not enclosed).
pub fn encloses(complex: &TriComplex, cycle: &[usize], s: usize) -> bool {
    if cycle.contains(&s) {
        return false;
    }
    let m = cycle.len();
    (0..m).filter(|&i| ray_crosses(complex, s, cycle[i], cycle[(i + 1) % m])).count() % 2 == 1
}

/// `ℓ(Γ)`: total order of the branch vertices enclosed by the cycle.
pub fn enclosed_weight(complex: &TriComplex, br: &BranchAssignment, cycle: &[usize]) -> u32 {
    br.entries()
        .iter()
        .filter(|&&(v, _)| encloses(complex, cycle, v))
        .map(|&(_, k)| k)
        .sum()
}

/// Decides whether `br` is a branch structure for `complex`.
///
/// For each nonempty subset `S` of the branch vertices the shortest simple
/// cycle enclosing all of `S` is found; a violation exists iff one of these is
/// at most `2·w(S) + 2` long. The returned witness maximises
/// [`CycleWitness::rank`] over all violating cycles.
pub fn verify_branch_structure(complex: &TriComplex, br: &BranchAssignment) -> Verdict {
    let entries = br.entries();
    let m = entries.len();
    if m == 0 {
        return Verdict::Ok;
    }
    assert!(m < 32, "branch sets with {m} vertices are too large for subset search");

    // crossing bits per directed edge, aligned with `neighbors`
    let crossing: Vec<Vec<u32>> = (0..complex.vertex_count())
        .map(|v| {
            complex
                .neighbors(v)
                .iter()
                .map(|&u| {
                    entries
                        .iter()
                        .enumerate()
                        .filter(|&(_, &(s, _))| ray_crosses(complex, s, v, u))
                        .fold(0u32, |acc, (i, _)| acc | 1 << i)
                })
                .collect()
        })
        .collect();

    // heavier subsets first so the deficit bound prunes the light ones
    let mut subsets: Vec<u32> = (1..1u32 << m).collect();
    let weight = |mask: u32| -> u32 { (0..m).filter(|i| mask >> i & 1 == 1).map(|i| entries[i].1).sum() };
    subsets.sort_by_key(|&s| (std::cmp::Reverse(weight(s)), s));

    let mut best: Option<CycleWitness> = None;
    for s_mask in subsets {
        let w = weight(s_mask);
        let mut max_len = 2 * w as usize + 2;
        if let Some(b) = &best {
            // only cycles reaching the current best deficit can matter
            let cap = 2 * i64::from(w) + 3 - b.deficit();
            if cap < 3 {
                continue;
            }
            max_len = max_len.min(cap as usize);
        }
        let members: Vec<usize> = (0..m).filter(|i| s_mask >> i & 1 == 1).collect();
        let Some(cycle) = shortest_enclosing_cycle(complex, &crossing, entries, &members, max_len) else {
            continue;
        };
        let ell = enclosed_weight(complex, br, &cycle);
        let cand = CycleWitness::new(complex, cycle, ell);
        if cand.deficit() > 0 && best.as_ref().is_none_or(|b| cand.rank() > b.rank()) {
            best = Some(cand);
        }
    }
    best.map_or(Verdict::Ok, Verdict::Violation)
}

/// Shortest simple cycle of length at most `max_len` that encloses every
/// branch vertex listed in `members`.
fn shortest_enclosing_cycle(
    complex: &TriComplex,
    crossing: &[Vec<u32>],
    entries: &[(usize, u32)],
    members: &[usize],
    max_len: usize,
) -> Option<Vec<usize>> {
    let nv = complex.vertex_count();
    let sources: Vec<usize> = members.iter().map(|&i| entries[i].0).collect();
    // a closed curve of perimeter P keeps every point within P/2 of anything it encloses
    let reach = max_len as f64 * complex.edge_length() / 2.0 + GEOM_TOL;
    let region: Vec<bool> = (0..nv)
        .map(|v| !sources.contains(&v) && sources.iter().all(|&s| (complex.pos(v) - complex.pos(s)).norm() <= reach))
        .collect();

    // parity bits restricted to `members`, compacted to 0..members.len()
    let compact = |bits: u32| -> usize {
        members.iter().enumerate().filter(|&(_, &i)| bits >> i & 1 == 1).fold(0, |acc, (j, _)| acc | 1 << j)
    };
    let masks: Vec<Vec<usize>> = crossing.iter().map(|row| row.iter().map(|&b| compact(b)).collect()).collect();
    let states = 1usize << members.len();
    let full = states - 1;

    // closing edges a → b that cross the ray of the first member
    let mut starts: Vec<(usize, usize, usize)> = Vec::new();
    for a in (0..nv).filter(|&a| region[a]) {
        for (j, &b) in complex.neighbors(a).iter().enumerate() {
            if a < b && region[b] && masks[a][j] & 1 == 1 {
                starts.push((a, b, masks[a][j]));
            }
        }
    }
    if starts.is_empty() {
        return None;
    }

    let heuristics: Vec<Vec<u8>> = starts
        .iter()
        .map(|&(a, _, _)| parity_distances(complex, &region, &masks, a, full, states))
        .collect();

    for len in 3..=max_len {
        for (si, &(a, b, m0)) in starts.iter().enumerate() {
            let h = &heuristics[si];
            if 1 + usize::from(h[b * states + m0]) > len {
                continue;
            }
            let mut search = PathSearch {
                complex,
                region: &region,
                masks: &masks,
                h,
                states,
                full,
                goal: a,
                target: len - 1,
                visited: vec![false; nv],
                path: vec![b],
            };
            search.visited[b] = true;
            if search.dfs(b, m0) {
                let mut cycle = search.path;
                cycle.insert(0, a);
                cycle.pop();
                return Some(cycle);
            }
        }
    }
    None
}

/// Breadth-first distances in the (vertex, parity) graph to `(goal, full)`,
/// saturated at 255.
fn parity_distances(
    complex: &TriComplex,
    region: &[bool],
    masks: &[Vec<usize>],
    goal: usize,
    full: usize,
    states: usize,
) -> Vec<u8> {
    let mut dist = vec![u8::MAX; complex.vertex_count() * states];
    let mut queue = VecDeque::new();
    dist[goal * states + full] = 0;
    queue.push_back((goal, full));
    while let Some((v, p)) = queue.pop_front() {
        let d = dist[v * states + p];
        if d == u8::MAX - 1 {
            continue;
        }
        for (j, &u) in complex.neighbors(v).iter().enumerate() {
            if !region[u] {
                continue;
            }
            let q = p ^ masks[v][j];
            let slot = &mut dist[u * states + q];
            if *slot == u8::MAX {
                *slot = d + 1;
                queue.push_back((u, q));
            }
        }
    }
    dist
}

struct PathSearch<'a> {
    complex: &'a TriComplex,
    region: &'a [bool],
    masks: &'a [Vec<usize>],
    h: &'a [u8],
    states: usize,
    full: usize,
    goal: usize,
    /// Number of edges the path from `b` to the goal must have.
    target: usize,
    visited: Vec<bool>,
    path: Vec<usize>,
}

impl PathSearch<'_> {
    fn dfs(&mut self, v: usize, p: usize) -> bool {
        let depth = self.path.len() - 1;
        for (j, &u) in self.complex.neighbors(v).iter().enumerate() {
            if !self.region[u] || self.visited[u] {
                continue;
            }
            let q = p ^ self.masks[v][j];
            if u == self.goal {
                if depth + 1 == self.target && q == self.full {
                    self.path.push(u);
                    return true;
                }
                continue;
            }
            if depth + 1 + usize::from(self.h[u * self.states + q]) > self.target {
                continue;
            }
            self.visited[u] = true;
            self.path.push(u);
            if self.dfs(u, q) {
                return true;
            }
            self.path.pop();
            self.visited[u] = false;
        }
        false
    }
}

/// Runs [`verify_branch_structure`] on a hexagonal patch of the ambient
/// lattice around the branch vertices, large enough that no violating cycle
/// can reach its edge. The witness (if any) refers to the patch.
pub fn verify_on_lattice(complex: &TriComplex, br: &BranchAssignment) -> (Verdict, TriComplex) {
    let coords: Vec<(i64, i64)> = br.vertices().map(|v| (complex.vertex(v).k, complex.vertex(v).l)).collect();
    let centre = coords.first().copied().unwrap_or((0, 0));
    let spread = coords.iter().map(|&c| hex_distance(c, centre)).max().unwrap_or(0);
    let total = i64::from(br.total_order());
    // a cycle of length 2Σk+2 stays within (Σk+1)·(2/√3) hex steps of what it encloses
    let reach = ((2.0 * (total + 1) as f64) / 3f64.sqrt()).ceil() as i64 + 1;
    let radius = spread + reach.max(total + 2);
    let patch = TriComplex::hex_patch(complex.mesh_n(), centre, radius as u32);
    let entries = br
        .entries()
        .iter()
        .map(|&(v, k)| (patch.vertex_at(complex.vertex(v).k, complex.vertex(v).l).expect("patch covers the branch set"), k))
        .collect();
    let mapped = BranchAssignment::new(&patch, entries).expect("branch vertices are deep inside the patch");
    (verify_branch_structure(&patch, &mapped), patch)
}
