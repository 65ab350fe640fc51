//! Circuit container, wire-level DAG and ASAP layering.

use thiserror::Error;

use crate::gate::{Gate, GateKind};

#[derive(Debug, Error, PartialEq)]
pub enum CircuitError {
    #[error("gate {index} ({gate}) uses qubit {qubit} outside a {width}-qubit register")]
    QubitOutOfRange {
        index: usize,
        gate: String,
        qubit: usize,
        width: usize,
    },
    #[error("gate {index} ({gate}) repeats a qubit operand")]
    DuplicateQubit { index: usize, gate: String },
    #[error("gate {index} ({gate}) expects {expected} qubit(s), got {got}")]
    QubitArity {
        index: usize,
        gate: String,
        expected: usize,
        got: usize,
    },
    #[error("gate {index} ({gate}) expects {expected} parameter(s), got {got}")]
    ParamArity {
        index: usize,
        gate: String,
        expected: usize,
        got: usize,
    },
    #[error("measurement {index} writes classical bit {clbit} outside a {width}-bit register")]
    ClbitOutOfRange {
        index: usize,
        clbit: usize,
        width: usize,
    },
}

/// Ordered gate list over `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct QCircuit {
    pub name: String,
    pub num_qubits: usize,
    pub num_clbits: usize,
    pub gates: Vec<Gate>,
}

impl QCircuit {
    pub fn new(name: impl Into<String>, num_qubits: usize) -> Self {
        QCircuit {
            name: name.into(),
            num_qubits,
            num_clbits: 0,
            gates: Vec::new(),
        }
    }

    pub fn with_gates(name: impl Into<String>, num_qubits: usize, gates: Vec<Gate>) -> Self {
        QCircuit {
            gates,
            ..Self::new(name, num_qubits)
        }
    }

    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Copy of this circuit with a different gate list.
    pub fn with_same_registers(&self, gates: Vec<Gate>) -> QCircuit {
        QCircuit {
            name: self.name.clone(),
            num_qubits: self.num_qubits,
            num_clbits: self.num_clbits,
            gates,
        }
    }

    pub fn cx_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_cx()).count()
    }

    /// Checks operand ranges, distinctness and parameter arities.
    pub fn validate(&self) -> Result<(), CircuitError> {
        for (index, g) in self.gates.iter().enumerate() {
            let name = || g.name().to_string();
            if let Some(expected) = g.kind.qubit_arity() {
                if g.qubits.len() != expected {
                    return Err(CircuitError::QubitArity {
                        index,
                        gate: name(),
                        expected,
                        got: g.qubits.len(),
                    });
                }
            }
            if let Some(expected) = g.kind.param_arity() {
                if g.params.len() != expected {
                    return Err(CircuitError::ParamArity {
                        index,
                        gate: name(),
                        expected,
                        got: g.params.len(),
                    });
                }
            }
            for (i, &q) in g.qubits.iter().enumerate() {
                if q >= self.num_qubits {
                    return Err(CircuitError::QubitOutOfRange {
                        index,
                        gate: name(),
                        qubit: q,
                        width: self.num_qubits,
                    });
                }
                if g.qubits[..i].contains(&q) {
                    return Err(CircuitError::DuplicateQubit { index, gate: name() });
                }
            }
            if let Some(c) = g.clbit {
                if c >= self.num_clbits {
                    return Err(CircuitError::ClbitOutOfRange {
                        index,
                        clbit: c,
                        width: self.num_clbits,
                    });
                }
            }
        }
        Ok(())
    }

    /// Wire-level dependency graph of the gate list.
    pub fn dag(&self) -> CircuitDag {
        CircuitDag::new(self)
    }

    /// ASAP layering of every gate.
    pub fn layers(&self) -> LayeredView {
        LayeredView::asap(self)
    }
}

/// For every gate, the neighbouring gate on each of its wires.
///
/// `pred[i][k]` / `succ[i][k]` belong to wire `gates[i].qubits[k]`.
#[derive(Debug, Clone)]
pub struct CircuitDag {
    pub pred: Vec<Vec<Option<usize>>>,
    pub succ: Vec<Vec<Option<usize>>>,
}

impl CircuitDag {
    pub fn new(c: &QCircuit) -> Self {
        let mut last: Vec<Option<usize>> = vec![None; c.num_qubits];
        let mut pred = Vec::with_capacity(c.len());
        let mut succ: Vec<Vec<Option<usize>>> =
            c.gates.iter().map(|g| vec![None; g.qubits.len()]).collect();
        for (i, g) in c.gates.iter().enumerate() {
            let mut p = Vec::with_capacity(g.qubits.len());
            for &q in &g.qubits {
                let prev = last[q];
                if let Some(j) = prev {
                    let slot = c.gates[j].qubits.iter().position(|&x| x == q).unwrap();
                    succ[j][slot] = Some(i);
                }
                p.push(prev);
                last[q] = Some(i);
            }
            pred.push(p);
        }
        CircuitDag { pred, succ }
    }

    /// Distinct predecessors of gate `i`.
    pub fn predecessors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        dedup_iter(&self.pred[i])
    }

    /// Distinct successors of gate `i`.
    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        dedup_iter(&self.succ[i])
    }
}

fn dedup_iter(slots: &[Option<usize>]) -> impl Iterator<Item = usize> + '_ {
    slots
        .iter()
        .enumerate()
        .filter_map(move |(k, s)| s.filter(|v| !slots[..k].contains(&Some(*v))))
}

/// ASAP layering: each gate sits in the earliest layer after all gates it
/// depends on through a shared wire.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayeredView {
    /// Gate indices per layer, ascending within a layer.
    pub layers: Vec<Vec<usize>>,
    /// Layer index of every gate.
    pub layer_of: Vec<usize>,
}

impl LayeredView {
    pub fn asap(c: &QCircuit) -> Self {
        let mut level = vec![0usize; c.num_qubits];
        let mut layers: Vec<Vec<usize>> = Vec::new();
        let mut layer_of = Vec::with_capacity(c.len());
        for (i, g) in c.gates.iter().enumerate() {
            let l = g.qubits.iter().map(|&q| level[q]).max().unwrap_or(0);
            for &q in &g.qubits {
                level[q] = l + 1;
            }
            if layers.len() <= l {
                layers.resize_with(l + 1, Vec::new);
            }
            layers[l].push(i);
            layer_of.push(l);
        }
        LayeredView { layers, layer_of }
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }
}

/// CNOT-centric quality figures of a circuit.
///
/// SWAPs count as three CX. Barriers are ignored by every figure and
/// measurements do not add depth, but both still order the gates around
/// them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Metrics {
    pub cnot_count: usize,
    /// Longest chain of CX gates through the circuit, counting only CX
    /// (single-qubit gates are transparent).
    pub cnot_depth: usize,
    pub total_gates: usize,
    pub total_depth: usize,
}

pub fn metrics(c: &QCircuit) -> Metrics {
    let mut cx_level = vec![0usize; c.num_qubits];
    let mut all_level = vec![0usize; c.num_qubits];
    let mut m = Metrics::default();
    for g in &c.gates {
        let (cx_weight, depth_weight) = match g.kind {
            GateKind::Cx => (1, 1),
            GateKind::Swap => (3, 3),
            GateKind::Barrier | GateKind::Measure => (0, 0),
            _ => (0, 1),
        };
        if g.kind != GateKind::Barrier {
            m.total_gates += 1;
        }
        m.cnot_count += cx_weight;

        let at = g.qubits.iter().map(|&q| all_level[q]).max().unwrap_or(0) + depth_weight;
        for &q in &g.qubits {
            all_level[q] = at;
        }
        m.total_depth = m.total_depth.max(at);

        let at = g.qubits.iter().map(|&q| cx_level[q]).max().unwrap_or(0) + cx_weight;
        // Only entangling gates propagate CX depth; a single-qubit gate
        // leaves its wire's CX level untouched, a barrier synchronises.
        if cx_weight > 0 || g.kind == GateKind::Barrier {
            for &q in &g.qubits {
                cx_level[q] = at;
            }
        }
        m.cnot_depth = m.cnot_depth.max(at);
    }
    m
}
