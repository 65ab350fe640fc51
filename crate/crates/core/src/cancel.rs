//! Removal of adjacent self-inverse gate pairs.
//!
//! Two identical CX gates (same control and target), or two H gates on the
//! same qubit, cancel when no other gate touches any of their wires in
//! between. Sweeps repeat until a fixed point, so pairs exposed by an
//! earlier cancellation are removed too.

use crate::circuit::QCircuit;
use crate::gate::{Gate, GateKind};

/// Cancels adjacent identical CX pairs.
pub fn cnot_cancellation(c: &QCircuit) -> QCircuit {
    to_fixed_point(c, |k| k == GateKind::Cx)
}

/// Cancels adjacent identical CX pairs and adjacent H pairs.
pub fn gate_cancellation(c: &QCircuit) -> QCircuit {
    to_fixed_point(c, |k| matches!(k, GateKind::Cx | GateKind::H))
}

fn to_fixed_point(c: &QCircuit, cancels: impl Fn(GateKind) -> bool) -> QCircuit {
    let mut gates = c.gates.clone();
    loop {
        let before = gates.len();
        gates = sweep(c.num_qubits, gates, &cancels);
        if gates.len() == before {
            return c.with_same_registers(gates);
        }
    }
}

/// One pass with a stack of surviving gates per wire. A gate cancels
/// against the gate on top of all its wire stacks when the two are equal.
fn sweep(num_qubits: usize, gates: Vec<Gate>, cancels: &impl Fn(GateKind) -> bool) -> Vec<Gate> {
    let mut stacks: Vec<Vec<usize>> = vec![Vec::new(); num_qubits];
    let mut alive = vec![true; gates.len()];
    for (i, g) in gates.iter().enumerate() {
        if cancels(g.kind) {
            let top = stacks[g.qubits[0]].last().copied();
            if let Some(j) = top {
                let shared = g.qubits.iter().all(|&q| stacks[q].last() == Some(&j));
                if shared && gates[j].kind == g.kind && gates[j].qubits == g.qubits {
                    alive[j] = false;
                    alive[i] = false;
                    for &q in &g.qubits {
                        stacks[q].pop();
                    }
                    continue;
                }
            }
        }
        for &q in &g.qubits {
            stacks[q].push(i);
        }
    }
    gates
        .into_iter()
        .zip(alive)
        .filter_map(|(g, a)| a.then_some(g))
        .collect()
}
