//! Gate kinds and single circuit instructions.

use std::fmt;

/// Instruction kinds understood by the compiler.
///
/// `Opaque1q`/`Opaque2q` carry gates the compiler does not know the
/// semantics of (e.g. `cz`, `cu1`). They keep their QASM name in
/// [`Gate::label`] and are routed like any other gate, but pattern passes
/// treat them as barriers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    Rx,
    Ry,
    Rz,
    U1,
    U2,
    U3,
    Cx,
    Swap,
    Barrier,
    Measure,
    Opaque1q,
    Opaque2q,
}

impl GateKind {
    /// Number of real parameters the kind takes, `None` for opaque gates
    /// whose arity is whatever the source declared.
    pub fn param_arity(self) -> Option<usize> {
        use GateKind::*;
        match self {
            Rx | Ry | Rz | U1 => Some(1),
            U2 => Some(2),
            U3 => Some(3),
            Opaque1q | Opaque2q => None,
            _ => Some(0),
        }
    }

    /// Number of qubit operands, `None` for barriers (any width).
    pub fn qubit_arity(self) -> Option<usize> {
        use GateKind::*;
        match self {
            Cx | Swap | Opaque2q => Some(2),
            Barrier => None,
            _ => Some(1),
        }
    }

    /// Lower-case QASM mnemonic. Opaque gates use their label instead.
    pub fn qasm_name(self) -> &'static str {
        use GateKind::*;
        match self {
            H => "h",
            X => "x",
            Y => "y",
            Z => "z",
            S => "s",
            Sdg => "sdg",
            T => "t",
            Tdg => "tdg",
            Rx => "rx",
            Ry => "ry",
            Rz => "rz",
            U1 => "u1",
            U2 => "u2",
            U3 => "u3",
            Cx => "cx",
            Swap => "swap",
            Barrier => "barrier",
            Measure => "measure",
            Opaque1q | Opaque2q => "opaque",
        }
    }

    /// Looks up a known QASM gate name. `CX` and `U` are the OpenQASM
    /// built-ins and alias `cx` / `u3`.
    pub fn from_qasm_name(name: &str) -> Option<GateKind> {
        use GateKind::*;
        Some(match name {
            "h" => H,
            "x" => X,
            "y" => Y,
            "z" => Z,
            "s" => S,
            "sdg" => Sdg,
            "t" => T,
            "tdg" => Tdg,
            "rx" => Rx,
            "ry" => Ry,
            "rz" => Rz,
            "u1" => U1,
            "u2" => U2,
            "u3" | "U" => U3,
            "cx" | "CX" => Cx,
            "swap" => Swap,
            _ => return None,
        })
    }

    /// Known single-qubit unitary gate (not opaque, barrier or measure).
    pub fn is_single_qubit_unitary(self) -> bool {
        use GateKind::*;
        matches!(
            self,
            H | X | Y | Z | S | Sdg | T | Tdg | Rx | Ry | Rz | U1 | U2 | U3
        )
    }

    pub fn is_opaque(self) -> bool {
        matches!(self, GateKind::Opaque1q | GateKind::Opaque2q)
    }
}

/// One circuit instruction.
///
/// For `Cx` the qubit order is `[control, target]`. Qubit indices refer to
/// whatever index space the owning circuit uses (virtual before layout,
/// physical after routing).
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub params: Vec<f64>,
    pub label: Option<String>,
    /// Classical bit written by a `Measure`.
    pub clbit: Option<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<usize>, params: Vec<f64>) -> Self {
        Gate {
            kind,
            qubits,
            params,
            label: None,
            clbit: None,
        }
    }

    pub fn h(q: usize) -> Self {
        Self::new(GateKind::H, vec![q], vec![])
    }

    pub fn x(q: usize) -> Self {
        Self::new(GateKind::X, vec![q], vec![])
    }

    pub fn ry(theta: f64, q: usize) -> Self {
        Self::new(GateKind::Ry, vec![q], vec![theta])
    }

    pub fn rz(theta: f64, q: usize) -> Self {
        Self::new(GateKind::Rz, vec![q], vec![theta])
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Self::new(GateKind::Cx, vec![control, target], vec![])
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Self::new(GateKind::Swap, vec![a, b], vec![])
    }

    pub fn measure(q: usize, clbit: usize) -> Self {
        Gate {
            clbit: Some(clbit),
            ..Self::new(GateKind::Measure, vec![q], vec![])
        }
    }

    pub fn barrier(qubits: Vec<usize>) -> Self {
        Self::new(GateKind::Barrier, qubits, vec![])
    }

    pub fn opaque(label: &str, qubits: Vec<usize>, params: Vec<f64>) -> Self {
        let kind = if qubits.len() == 2 {
            GateKind::Opaque2q
        } else {
            GateKind::Opaque1q
        };
        Gate {
            label: Some(label.to_string()),
            ..Self::new(kind, qubits, params)
        }
    }

    pub fn is_cx(&self) -> bool {
        self.kind == GateKind::Cx
    }

    /// Control of a CX.
    pub fn control(&self) -> usize {
        self.qubits[0]
    }

    /// Target of a CX, or the operand of a single-qubit gate.
    pub fn target(&self) -> usize {
        *self.qubits.last().expect("gate without qubits")
    }

    /// Two-qubit operation that needs a coupling edge when routed.
    pub fn is_two_qubit(&self) -> bool {
        self.kind != GateKind::Barrier && self.qubits.len() == 2
    }

    pub fn acts_on(&self, q: usize) -> bool {
        self.qubits.contains(&q)
    }

    /// Same gate with every qubit index passed through `map`.
    pub fn remapped(&self, map: impl Fn(usize) -> usize) -> Gate {
        Gate {
            qubits: self.qubits.iter().map(|&q| map(q)).collect(),
            ..self.clone()
        }
    }

    /// Name used when emitting QASM.
    pub fn name(&self) -> &str {
        match (&self.label, self.kind.is_opaque()) {
            (Some(l), true) => l,
            _ => self.kind.qasm_name(),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())?;
        if !self.params.is_empty() {
            let ps: Vec<String> = self.params.iter().map(|p| p.to_string()).collect();
            write!(f, "({})", ps.join(","))?;
        }
        let qs: Vec<String> = self.qubits.iter().map(|q| q.to_string()).collect();
        write!(f, " {}", qs.join(","))
    }
}
