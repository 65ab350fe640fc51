//! Chain-shaped initial layouts.
//!
//! A greedy walk from node 0 builds a path through the coupling graph,
//! preferring the next-numbered neighbour. Nodes that would be dead ends are
//! set aside as *isolated*; if the path ends up shorter than the circuit,
//! isolated nodes are spliced back in next to a chain neighbour.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::coupling::CouplingMap;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChainError {
    #[error("circuit needs {needed} qubits but the device has {available}")]
    TooManyQubits { needed: usize, available: usize },
    #[error("chain reaches only {achieved} of {needed} qubits")]
    TooShort { achieved: usize, needed: usize },
    #[error("layout maps two virtual qubits to physical qubit {0}")]
    NotInjective(usize),
    #[error("physical qubit {qubit} outside a {n}-qubit device")]
    OutOfRange { qubit: usize, n: usize },
}

/// Path of physical qubits plus the nodes left out of it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    pub order: Vec<usize>,
    pub isolated: BTreeSet<usize>,
    /// Iterations of the walk loop (one per step forward or back).
    pub steps: usize,
    /// Size of the device the chain lives on.
    pub device_size: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ChainOptions {
    /// Walk from every start node and keep the longest walk instead of
    /// always starting at 0.
    pub all_starts: bool,
}

/// Chain of at least `m` nodes starting at node 0.
pub fn chain(g: &CouplingMap, m: usize) -> Result<Chain, ChainError> {
    chain_with(g, m, ChainOptions::default())
}

pub fn chain_with(g: &CouplingMap, m: usize, opts: ChainOptions) -> Result<Chain, ChainError> {
    if m > g.n() {
        return Err(ChainError::TooManyQubits {
            needed: m,
            available: g.n(),
        });
    }
    let starts = if opts.all_starts { g.n() } else { 1.min(g.n()) };
    let mut best: Option<Walk> = None;
    for s in 0..starts {
        let w = walk(g, s);
        if best.as_ref().is_none_or(|b| w.chain.order.len() > b.chain.order.len()) {
            best = Some(w);
        }
    }
    let Some(mut w) = best else {
        return Ok(Chain {
            order: Vec::new(),
            isolated: BTreeSet::new(),
            steps: 0,
            device_size: 0,
        });
    };
    if w.chain.order.len() >= m {
        return Ok(w.chain);
    }
    check_for_isolated(g, &w.chain.order, &mut w.explored, &mut w.chain.isolated);
    expand_chain(g, w.chain, m)
}

struct Walk {
    chain: Chain,
    explored: Vec<bool>,
}

fn walk(g: &CouplingMap, start: usize) -> Walk {
    let n = g.n();
    let mut explored = vec![false; n];
    let mut n_explored = 1;
    explored[start] = true;
    let mut order = vec![start];
    let mut isolated = BTreeSet::new();
    let mut x = start;
    let mut last_back_step: Option<usize> = None;
    let mut backtracks = 0;
    let mut steps = 0;

    while n_explored < n {
        steps += 1;
        let open: Vec<usize> = g.neighbors(x).iter().copied().filter(|&q| !explored[q]).collect();
        if !open.is_empty() {
            x = if open.contains(&(x + 1)) { x + 1 } else { open[0] };
            explored[x] = true;
            n_explored += 1;
            order.push(x);
            for &q in g.neighbors(x) {
                if explored[q] || n_explored >= n - 1 {
                    continue;
                }
                let dead_end = g.neighbors(q).iter().all(|&r| r == x || explored[r]);
                if dead_end {
                    explored[q] = true;
                    n_explored += 1;
                    isolated.insert(q);
                }
            }
        } else {
            if order.len() <= 1 || backtracks >= n {
                break;
            }
            let min_unexplored = (0..n).find(|&q| !explored[q]).unwrap_or(0);
            let before_tail = order[order.len() - 2];
            if last_back_step != Some(before_tail) && n - n_explored > x.abs_diff(min_unexplored) {
                break;
            }
            isolated.insert(x);
            order.pop();
            x = *order.last().unwrap();
            last_back_step = Some(x);
            backtracks += 1;
        }
    }
    Walk {
        chain: Chain {
            order,
            isolated,
            steps,
            device_size: n,
        },
        explored,
    }
}

/// Marks as isolated (and explored) every unexplored node adjacent to an
/// isolated node or to the chain. One ascending pass; nodes isolated
/// earlier in the pass count for later ones.
pub fn check_for_isolated(
    g: &CouplingMap,
    order: &[usize],
    explored: &mut [bool],
    isolated: &mut BTreeSet<usize>,
) {
    let on_chain: BTreeSet<usize> = order.iter().copied().collect();
    for m in 0..g.n().min(explored.len()) {
        if explored[m] || isolated.contains(&m) {
            continue;
        }
        let near = g
            .neighbors(m)
            .iter()
            .any(|q| isolated.contains(q) || on_chain.contains(q));
        if near {
            isolated.insert(m);
            explored[m] = true;
        }
    }
}

/// Splices isolated nodes into the chain until it has `m` nodes. Each
/// splice takes the smallest isolated node with a chain neighbour and puts
/// it right after the smallest such neighbour.
pub fn expand_chain(g: &CouplingMap, mut c: Chain, m: usize) -> Result<Chain, ChainError> {
    while c.order.len() < m {
        let pick = c.isolated.iter().find_map(|&q| {
            let anchor = g.neighbors(q).iter().copied().filter(|x| c.order.contains(x)).min()?;
            Some((q, anchor))
        });
        let Some((q, anchor)) = pick else {
            return Err(ChainError::TooShort {
                achieved: c.order.len(),
                needed: m,
            });
        };
        let at = c.order.iter().position(|&x| x == anchor).unwrap();
        c.order.insert(at + 1, q);
        c.isolated.remove(&q);
    }
    Ok(c)
}

/// Injective virtual-to-physical assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    v2p: Vec<usize>,
    p2v: Vec<Option<usize>>,
}

impl Layout {
    pub fn new(v2p: Vec<usize>, n: usize) -> Result<Self, ChainError> {
        let mut p2v = vec![None; n];
        for (v, &p) in v2p.iter().enumerate() {
            if p >= n {
                return Err(ChainError::OutOfRange { qubit: p, n });
            }
            if p2v[p].is_some() {
                return Err(ChainError::NotInjective(p));
            }
            p2v[p] = Some(v);
        }
        Ok(Layout { v2p, p2v })
    }

    pub fn identity(m: usize, n: usize) -> Result<Self, ChainError> {
        Self::new((0..m).collect(), n)
    }

    pub fn v2p(&self) -> &[usize] {
        &self.v2p
    }

    pub fn phys(&self, v: usize) -> usize {
        self.v2p[v]
    }

    pub fn virt(&self, p: usize) -> Option<usize> {
        self.p2v[p]
    }

    pub fn num_virtual(&self) -> usize {
        self.v2p.len()
    }

    pub fn num_physical(&self) -> usize {
        self.p2v.len()
    }

    /// Exchanges whatever sits on physical qubits `a` and `b`.
    pub fn swap_physical(&mut self, a: usize, b: usize) {
        self.p2v.swap(a, b);
        for p in [a, b] {
            if let Some(v) = self.p2v[p] {
                self.v2p[v] = p;
            }
        }
    }
}

/// Virtual qubit `i` goes to `chain.order[i]`.
pub fn initial_layout(c: &Chain, m: usize) -> Result<Layout, ChainError> {
    if c.order.len() < m {
        return Err(ChainError::TooShort {
            achieved: c.order.len(),
            needed: m,
        });
    }
    Layout::new(c.order[..m].to_vec(), c.device_size)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star5() -> CouplingMap {
        CouplingMap::new(5, [(0, 2), (1, 2), (2, 3), (2, 4)]).unwrap()
    }

    #[test]
    fn line_is_walked_in_order() {
        let c = chain(&CouplingMap::line(5), 5).unwrap();
        assert_eq!(c.order, vec![0, 1, 2, 3, 4]);
        assert!(c.isolated.is_empty());
    }

    #[test]
    fn square_grid_trace() {
        let c = chain(&CouplingMap::grid(2, 2), 4).unwrap();
        assert_eq!(c.order, vec![0, 1, 3, 2]);
    }

    #[test]
    fn star_leaves_are_set_aside() {
        let c = chain(&star5(), 3).unwrap();
        assert_eq!(c.order, vec![0, 2, 4]);
        assert_eq!(c.isolated, [1, 3].into_iter().collect());
    }

    #[test]
    fn star_cannot_grow_into_a_path() {
        let c = chain(&star5(), 4).unwrap();
        assert_eq!(c.order.len(), 4);
        assert_eq!(c.order, vec![0, 2, 1, 4]);
    }

    #[test]
    fn check_for_isolated_picks_up_star_leaves() {
        let g = star5();
        let mut explored = vec![true, false, true, false, false];
        let mut isolated = BTreeSet::new();
        check_for_isolated(&g, &[0, 2], &mut explored, &mut isolated);
        assert_eq!(isolated, [1, 3, 4].into_iter().collect());
    }

    #[test]
    fn check_for_isolated_no_change_when_explored() {
        let g = CouplingMap::line(3);
        let mut explored = vec![true; 3];
        let mut isolated = BTreeSet::new();
        check_for_isolated(&g, &[0, 1, 2], &mut explored, &mut isolated);
        assert!(isolated.is_empty());
    }

    #[test]
    fn check_for_isolated_skips_far_nodes() {
        let g = CouplingMap::line(4);
        let mut explored = vec![true, false, false, false];
        let mut isolated = BTreeSet::new();
        // Node 2 only touches unexplored nodes when it is visited, but node
        // 1 turns isolated first in the same pass.
        check_for_isolated(&g, &[0], &mut explored, &mut isolated);
        assert_eq!(isolated, [1, 2, 3].into_iter().collect());
        let mut explored = vec![false, false, false, true];
        let mut isolated = BTreeSet::new();
        check_for_isolated(&g, &[3], &mut explored, &mut isolated);
        assert_eq!(isolated, [2].into_iter().collect());
    }

    #[test]
    fn expand_without_need_is_noop() {
        let g = CouplingMap::line(3);
        let c = Chain {
            order: vec![0, 1, 2],
            isolated: BTreeSet::new(),
            steps: 0,
            device_size: 3,
        };
        assert_eq!(expand_chain(&g, c.clone(), 3).unwrap(), c);
    }

    #[test]
    fn expand_without_candidates_fails() {
        let g = CouplingMap::line(4);
        let c = Chain {
            order: vec![0, 1],
            isolated: [3].into_iter().collect(),
            steps: 0,
            device_size: 4,
        };
        assert_eq!(
            expand_chain(&g, c, 3),
            Err(ChainError::TooShort { achieved: 2, needed: 3 })
        );
    }

    #[test]
    fn too_many_qubits() {
        assert_eq!(
            chain(&CouplingMap::line(3), 4),
            Err(ChainError::TooManyQubits { needed: 4, available: 3 })
        );
    }

    #[test]
    fn layout_takes_chain_prefix() {
        let c = Chain {
            order: vec![0, 1, 3, 2],
            isolated: BTreeSet::new(),
            steps: 0,
            device_size: 4,
        };
        assert_eq!(initial_layout(&c, 3).unwrap().v2p(), &[0, 1, 3]);
        assert!(initial_layout(&c, 0).unwrap().v2p().is_empty());
        assert!(initial_layout(&c, 5).is_err());
    }

    #[test]
    fn layout_swap_tracks_both_directions() {
        let mut l = Layout::new(vec![2, 0], 3).unwrap();
        l.swap_physical(0, 1);
        assert_eq!(l.v2p(), &[2, 1]);
        assert_eq!((l.virt(0), l.virt(1)), (None, Some(1)));
        assert_eq!(Layout::new(vec![1, 1], 3), Err(ChainError::NotInjective(1)));
    }

    #[test]
    fn all_starts_is_never_shorter() {
        let g = star5();
        let a = chain(&g, 3).unwrap();
        let b = chain_with(&g, 3, ChainOptions { all_starts: true }).unwrap();
        assert!(b.order.len() >= a.order.len());
    }
}
