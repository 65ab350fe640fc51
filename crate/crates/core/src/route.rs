//! Deterministic SABRE-style swap insertion.
//!
//! Gates are executed as soon as their dependencies are met and, for
//! two-qubit gates, their operands sit on a coupling edge. When nothing is
//! executable a SWAP is chosen among the edges touching the blocked gates,
//! scored by the summed distance of the blocked gates plus half the summed
//! distance of a lookahead window.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::chain::Layout;
use crate::circuit::QCircuit;
use crate::coupling::CouplingMap;
use crate::gate::Gate;
use crate::oracle::{self, OracleError};

/// Two-qubit gates beyond the front layer that contribute to the score.
pub const LOOKAHEAD: usize = 20;
pub const LOOKAHEAD_WEIGHT: f64 = 0.5;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RouteError {
    #[error("layout covers {layout} virtual qubits, circuit has {circuit}")]
    LayoutSize { layout: usize, circuit: usize },
    #[error("layout spans {layout} physical qubits, device has {device}")]
    DeviceSize { layout: usize, device: usize },
    #[error("gate {0} has more than two qubits")]
    WideGate(usize),
}

/// Output of [`route`]: a circuit over physical qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutedCircuit {
    pub circuit: QCircuit,
    pub initial_layout: Layout,
    pub final_layout: Layout,
    pub swap_count: usize,
    /// `permutation[p]` is where the state initially on physical qubit `p`
    /// ends up.
    pub permutation: Vec<usize>,
}

/// Blocked two-qubit gates: every predecessor has been emitted but the
/// operands are not adjacent.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrontLayer {
    pub gates: BTreeSet<usize>,
}

/// Score of applying `swap` under `layout`: front-layer distance plus the
/// weighted lookahead distance. Gates act on virtual qubits.
pub fn swap_score(
    front: &[&Gate],
    lookahead: &[&Gate],
    layout: &Layout,
    swap: (usize, usize),
    g: &CouplingMap,
) -> f64 {
    let moved = |v: usize| {
        let p = layout.phys(v);
        if p == swap.0 {
            swap.1
        } else if p == swap.1 {
            swap.0
        } else {
            p
        }
    };
    let total = |gates: &[&Gate]| -> f64 {
        gates
            .iter()
            .map(|x| g.dist(moved(x.qubits[0]), moved(x.qubits[1])) as f64)
            .sum()
    };
    total(front) + LOOKAHEAD_WEIGHT * total(lookahead)
}

/// Routes `c` onto `g` starting from `l0`. Physical qubits not used by
/// `l0` hold idle ancillas that swaps may move around.
pub fn route(c: &QCircuit, l0: &Layout, g: &CouplingMap) -> Result<RoutedCircuit, RouteError> {
    if l0.num_virtual() != c.num_qubits {
        return Err(RouteError::LayoutSize {
            layout: l0.num_virtual(),
            circuit: c.num_qubits,
        });
    }
    if l0.num_physical() != g.n() {
        return Err(RouteError::DeviceSize {
            layout: l0.num_physical(),
            device: g.n(),
        });
    }
    if let Some(i) = c
        .gates
        .iter()
        .position(|x| x.kind != crate::GateKind::Barrier && x.qubits.len() > 2)
    {
        return Err(RouteError::WideGate(i));
    }

    let n = g.n();
    let m = c.num_qubits;
    let mut v2p = l0.v2p().to_vec();
    v2p.extend((0..n).filter(|&p| l0.virt(p).is_none()));
    let mut layout = Layout::new(v2p, n).expect("ancillas fill free qubits");
    let start = layout.clone();

    let dag = c.dag();
    let mut waiting: Vec<usize> = (0..c.len()).map(|i| dag.predecessors(i).count()).collect();
    let mut ready: BTreeSet<usize> = (0..c.len()).filter(|&i| waiting[i] == 0).collect();
    let mut done = vec![false; c.len()];
    let mut cursor = 0;
    let mut out = Vec::with_capacity(c.len());
    let mut swap_count = 0;
    let mut idle_swaps = 0;
    let mut last_swap = None;

    loop {
        let mut progressed = true;
        while progressed {
            progressed = false;
            let runnable: Vec<usize> = ready
                .iter()
                .copied()
                .filter(|&i| {
                    let x = &c.gates[i];
                    !x.is_two_qubit() || g.is_edge(layout.phys(x.qubits[0]), layout.phys(x.qubits[1]))
                })
                .collect();
            for i in runnable {
                out.push(c.gates[i].remapped(|v| layout.phys(v)));
                ready.remove(&i);
                done[i] = true;
                for s in dag.successors(i) {
                    waiting[s] -= 1;
                    if waiting[s] == 0 {
                        ready.insert(s);
                    }
                }
                progressed = true;
                idle_swaps = 0;
                last_swap = None;
            }
        }
        if ready.is_empty() {
            break;
        }

        let front = FrontLayer { gates: ready.clone() };
        if idle_swaps >= n {
            // Walk the oldest blocked gate's operands together.
            let oldest = &c.gates[*front.gates.first().unwrap()];
            let path = g.shortest_path(layout.phys(oldest.qubits[0]), layout.phys(oldest.qubits[1]));
            for w in path[..path.len() - 1].windows(2) {
                out.push(Gate::swap(w[0], w[1]));
                layout.swap_physical(w[0], w[1]);
                swap_count += 1;
            }
            idle_swaps = 0;
            last_swap = None;
            continue;
        }

        while cursor < c.len() && done[cursor] {
            cursor += 1;
        }
        let lookahead: Vec<&Gate> = (cursor..c.len())
            .filter(|&i| !done[i] && !front.gates.contains(&i) && c.gates[i].is_two_qubit())
            .take(LOOKAHEAD)
            .map(|i| &c.gates[i])
            .collect();
        let blocked: Vec<&Gate> = front.gates.iter().map(|&i| &c.gates[i]).collect();
        let mut candidates = BTreeSet::new();
        for x in &blocked {
            for &v in &x.qubits {
                let p = layout.phys(v);
                for &q in g.neighbors(p) {
                    candidates.insert((p.min(q), p.max(q)));
                }
            }
        }
        let mut best: Option<((usize, usize), f64)> = None;
        // Undoing the previous swap only recreates an earlier state.
        for &s in candidates.iter().filter(|&&s| Some(s) != last_swap) {
            let score = swap_score(&blocked, &lookahead, &layout, s, g);
            if best.is_none_or(|(_, b)| score < b) {
                best = Some((s, score));
            }
        }
        let ((a, b), _) = best.expect("a blocked gate has neighbours");
        out.push(Gate::swap(a, b));
        layout.swap_physical(a, b);
        swap_count += 1;
        idle_swaps += 1;
        last_swap = Some((a, b));
    }

    let permutation: Vec<usize> = (0..n)
        .map(|p| layout.phys(start.virt(p).expect("full layout")))
        .collect();
    let final_layout = Layout::new(layout.v2p()[..m].to_vec(), n).expect("injective");
    let circuit = QCircuit {
        name: c.name.clone(),
        num_qubits: n,
        num_clbits: c.num_clbits,
        gates: out,
    };
    Ok(RoutedCircuit {
        circuit,
        initial_layout: l0.clone(),
        final_layout,
        swap_count,
        permutation,
    })
}

impl RoutedCircuit {
    /// Two-qubit gates that do not sit on a coupling edge.
    pub fn violations(&self, g: &CouplingMap) -> Vec<usize> {
        self.circuit
            .gates
            .iter()
            .enumerate()
            .filter(|(_, x)| x.is_two_qubit() && !g.is_edge(x.qubits[0], x.qubits[1]))
            .map(|(i, _)| i)
            .collect()
    }

    /// The routed circuit and `original` placed through the initial
    /// layout, both restricted to the physical qubits they touch, plus the
    /// tracked permutation on that subset. Feeding the triple to
    /// [`oracle::equivalent`] checks the routing.
    pub fn compacted(&self, original: &QCircuit) -> (QCircuit, QCircuit, Vec<usize>) {
        let mut active: BTreeSet<usize> = self.initial_layout.v2p().iter().copied().collect();
        for x in &self.circuit.gates {
            active.extend(x.qubits.iter().copied());
        }
        let active: Vec<usize> = active.into_iter().collect();
        let mut compact = vec![usize::MAX; self.circuit.num_qubits];
        for (k, &p) in active.iter().enumerate() {
            compact[p] = k;
        }
        let k = active.len();
        let routed = QCircuit {
            num_qubits: k,
            gates: self.circuit.gates.iter().map(|x| x.remapped(|p| compact[p])).collect(),
            ..self.circuit.clone()
        };
        let placed = QCircuit {
            num_qubits: k,
            gates: original
                .gates
                .iter()
                .map(|x| x.remapped(|v| compact[self.initial_layout.phys(v)]))
                .collect(),
            ..original.clone()
        };
        let perm = active.iter().map(|&p| compact[self.permutation[p]]).collect();
        (routed, placed, perm)
    }

    /// Checks the routing against `original`: densely up to the unitary
    /// limit, with four random product states beyond it.
    pub fn verify(&self, original: &QCircuit, tol: f64) -> Result<bool, OracleError> {
        let (routed, placed, perm) = self.compacted(original);
        if routed.num_qubits <= oracle::MAX_UNITARY_QUBITS {
            oracle::equivalent(&routed, &placed, &perm, tol)
        } else {
            oracle::statevector_check(&routed, &placed, &perm, 4, 0, tol)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circ(m: usize, gates: Vec<Gate>) -> QCircuit {
        QCircuit::with_gates("t", m, gates)
    }

    #[test]
    fn compliant_circuit_needs_no_swaps() {
        let g = CouplingMap::grid(2, 2);
        let c = circ(3, vec![Gate::h(0), Gate::cx(0, 1), Gate::cx(1, 2)]);
        let l0 = Layout::new(vec![0, 1, 3], 4).unwrap();
        let r = route(&c, &l0, &g).unwrap();
        assert_eq!(r.swap_count, 0);
        assert_eq!(r.circuit.gates, vec![Gate::h(0), Gate::cx(0, 1), Gate::cx(1, 3)]);
        assert_eq!(r.permutation, vec![0, 1, 2, 3]);
    }

    #[test]
    fn distant_cx_on_a_line_takes_two_swaps() {
        let g = CouplingMap::line(4);
        let c = circ(4, vec![Gate::cx(0, 3)]);
        let r = route(&c, &Layout::identity(4, 4).unwrap(), &g).unwrap();
        assert_eq!(r.swap_count, 2);
        assert!(r.violations(&g).is_empty());
        assert!(r.verify(&c, 1e-10).unwrap());
    }

    #[test]
    fn empty_front_scores_zero() {
        let g = CouplingMap::line(3);
        let l = Layout::identity(3, 3).unwrap();
        assert_eq!(swap_score(&[], &[], &l, (0, 1), &g), 0.0);
    }

    #[test]
    fn score_counts_front_distance() {
        let g = CouplingMap::line(4);
        let l = Layout::identity(4, 4).unwrap();
        let cx = Gate::cx(0, 3);
        assert_eq!(swap_score(&[&cx], &[], &l, (2, 3), &g), 2.0);
        assert_eq!(swap_score(&[&cx], &[], &l, (0, 1), &g), 2.0);
        let next = Gate::cx(1, 2);
        assert_eq!(swap_score(&[&cx], &[&next], &l, (2, 3), &g), 3.0);
    }

    #[test]
    fn ancillas_travel_with_swaps() {
        let g = CouplingMap::line(3);
        let c = circ(2, vec![Gate::cx(0, 1)]);
        let l0 = Layout::new(vec![0, 2], 3).unwrap();
        let r = route(&c, &l0, &g).unwrap();
        assert_eq!(r.swap_count, 1);
        assert_eq!(r.circuit.gates[0], Gate::swap(0, 1));
        assert_eq!(r.final_layout.v2p(), &[1, 2]);
        assert_eq!(r.permutation, vec![1, 0, 2]);
        assert!(r.verify(&c, 1e-10).unwrap());
    }

    #[test]
    fn layout_size_is_checked() {
        let g = CouplingMap::line(3);
        let c = circ(2, vec![]);
        assert!(matches!(
            route(&c, &Layout::identity(3, 3).unwrap(), &g),
            Err(RouteError::LayoutSize { .. })
        ));
        assert!(matches!(
            route(&c, &Layout::identity(2, 4).unwrap(), &g),
            Err(RouteError::DeviceSize { .. })
        ));
    }

    #[test]
    fn barriers_and_single_qubit_gates_never_block() {
        let g = CouplingMap::line(3);
        let c = circ(3, vec![Gate::barrier(vec![0, 2]), Gate::h(2), Gate::cx(0, 2)]);
        let r = route(&c, &Layout::identity(3, 3).unwrap(), &g).unwrap();
        assert_eq!(r.swap_count, 1);
        assert!(r.violations(&g).is_empty());
    }
}
