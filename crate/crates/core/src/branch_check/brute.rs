use std::collections::HashMap;

use thiserror::Error;

use super::{ray_crosses, CycleWitness, Verdict};
use crate::complex::{BranchAssignment, TriComplex};

pub const DEFAULT_NODE_BUDGET: u64 = 200_000_000;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("cycle enumeration exceeded {budget} search nodes")]
pub struct BudgetExceeded {
    pub budget: u64,
}

/// Every simple cycle up to a length bound, grouped by the set of vertices it
/// encloses. Only the shortest cycle per enclosed set is kept.
#[derive(Clone, Debug)]
pub struct CycleCatalog {
    max_len: usize,
    cycles_seen: u64,
    groups: Vec<Group>,
}

#[derive(Clone, Debug)]
struct Group {
    enclosed: Vec<usize>,
    cycle: Vec<usize>,
}

impl CycleCatalog {
    pub fn enumerate(complex: &TriComplex, max_len: usize, node_budget: u64) -> Result<Self, BudgetExceeded> {
        let nv = complex.vertex_count();
        let words = nv.div_ceil(64);
        let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut groups: Vec<Group> = Vec::new();
        let mut cycles_seen = 0u64;
        let mut nodes = 0u64;

        let mut on_path = vec![false; nv];
        let mut path: Vec<usize> = Vec::with_capacity(max_len);
        // explicit stack of (vertex, next neighbour slot)
        let mut stack: Vec<(usize, usize)> = Vec::with_capacity(max_len);
        for start in 0..nv {
            path.clear();
            path.push(start);
            on_path[start] = true;
            stack.push((start, 0));
            while let Some(&mut (v, ref mut slot)) = stack.last_mut() {
                let nb = complex.neighbors(v);
                if *slot >= nb.len() {
                    stack.pop();
                    on_path[v] = false;
                    path.pop();
                    continue;
                }
                let u = nb[*slot];
                *slot += 1;
                if u == start {
                    // each cycle once: smallest vertex first, second below last
                    if path.len() >= 3 && path[1] < path[path.len() - 1] {
                        cycles_seen += 1;
                        let mut bits = vec![0u64; words];
                        for s in 0..nv {
                            if on_path[s] {
                                continue;
                            }
                            let m = path.len();
                            let odd = (0..m).filter(|&i| ray_crosses(complex, s, path[i], path[(i + 1) % m])).count() % 2 == 1;
                            if odd {
                                bits[s / 64] |= 1 << (s % 64);
                            }
                        }
                        match index.get(&bits) {
                            Some(&g) => {
                                if path.len() < groups[g].cycle.len() {
                                    groups[g].cycle = path.clone();
                                }
                            }
                            None => {
                                let enclosed = (0..nv).filter(|&s| bits[s / 64] >> (s % 64) & 1 == 1).collect();
                                index.insert(bits, groups.len());
                                groups.push(Group { enclosed, cycle: path.clone() });
                            }
                        }
                    }
                    continue;
                }
                if u < start || on_path[u] || path.len() >= max_len {
                    continue;
                }
                nodes += 1;
                if nodes > node_budget {
                    return Err(BudgetExceeded { budget: node_budget });
                }
                on_path[u] = true;
                path.push(u);
                stack.push((u, 0));
            }
        }
        Ok(Self { max_len, cycles_seen, groups })
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    /// Number of simple cycles enumerated.
    pub fn cycle_count(&self) -> u64 {
        self.cycles_seen
    }

    /// Number of distinct enclosed vertex sets.
    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    /// Applies the definition directly to every catalogued cycle.
    pub fn check(&self, complex: &TriComplex, br: &BranchAssignment) -> Verdict {
        let order = br.order_table(complex.vertex_count());
        let mut best: Option<CycleWitness> = None;
        for g in &self.groups {
            let ell: u32 = g.enclosed.iter().map(|&v| order[v]).sum();
            if g.cycle.len() >= 2 * ell as usize + 3 {
                continue;
            }
            let cand = CycleWitness::new(complex, g.cycle.clone(), ell);
            if best.as_ref().is_none_or(|b| cand.rank() > b.rank()) {
                best = Some(cand);
            }
        }
        best.map_or(Verdict::Ok, Verdict::Violation)
    }
}

/// Exhaustive check over all simple cycles of length at most `max_len`.
pub fn brute_force_check(complex: &TriComplex, br: &BranchAssignment, max_len: usize) -> Result<Verdict, BudgetExceeded> {
    Ok(CycleCatalog::enumerate(complex, max_len, DEFAULT_NODE_BUDGET)?.check(complex, br))
}
