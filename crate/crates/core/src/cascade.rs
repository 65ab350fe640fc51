//! CNOT cascade detection and nearest-neighbour rewriting.
//!
//! A *cascade* is a run of CX gates sharing one target (fan-in); an
//! *inverted* cascade shares one control (fan-out). Fan-ins are replaced by
//! a parity sweep over the sorted qubit line, fan-outs are first turned into
//! fan-ins by Hadamard conjugation. The Hadamard pairs this leaves between
//! consecutive cascades are removed afterwards by
//! [`crate::cancel::gate_cancellation`].

use std::collections::BTreeSet;

use thiserror::Error;

use crate::circuit::{LayeredView, QCircuit};
use crate::gate::{Gate, GateKind};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PatternError {
    #[error("a cascade needs at least two controls, got {0}")]
    TooFewControls(usize),
    #[error("qubit {0} appears twice in the cascade")]
    RepeatedQubit(usize),
}

/// Which qubit the CX gates of a cascade share.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Shared target.
    Plain,
    /// Shared control.
    Inverted,
}

/// A cascade found by [`check_cascade`].
///
/// For inverted matches the roles are those after Hadamard conjugation:
/// `target` is the shared control of the original gates and `ctrls` are
/// their targets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CascadeMatch {
    pub direction: Direction,
    pub target: usize,
    /// Sorted ascending.
    pub ctrls: Vec<usize>,
    /// Matched CX gates in circuit order; the first one is the anchor.
    pub cx_gates: Vec<usize>,
    /// Single-qubit gates moved in front of the replacement.
    pub before: Vec<usize>,
    /// Single-qubit gates moved behind the replacement.
    pub after: Vec<usize>,
    /// Every gate index consumed by the rewrite.
    pub skip: BTreeSet<usize>,
    /// Layer of the anchor; the replacement is emitted there.
    pub last: usize,
}

impl CascadeMatch {
    pub fn inverted(&self) -> bool {
        self.direction == Direction::Inverted
    }

    pub fn anchor(&self) -> usize {
        self.cx_gates[0]
    }

    /// Gates that replace the matched region, before- and after-gates
    /// included.
    pub fn replacement(&self, c: &QCircuit) -> Vec<Gate> {
        let mut out: Vec<Gate> = self.before.iter().map(|&i| c.gates[i].clone()).collect();
        let mut qubits: Vec<usize> = self.ctrls.clone();
        qubits.push(self.target);
        qubits.sort_unstable();
        let wrap = self.inverted();
        if wrap {
            out.extend(qubits.iter().map(|&q| Gate::h(q)));
        }
        if self.ctrls.len() >= 2 {
            out.extend(nn_decompose(&self.ctrls, self.target).expect("match invariants"));
        } else {
            // Single gate: just its conjugated form.
            out.extend(self.ctrls.iter().map(|&q| Gate::cx(q, self.target)));
        }
        if wrap {
            out.extend(qubits.iter().map(|&q| Gate::h(q)));
        }
        out.extend(self.after.iter().map(|&i| c.gates[i].clone()));
        out
    }
}

/// Scans forward from the CX at `start` for a cascade in `direction`.
///
/// Gates before `start` in list order count as already emitted. The scan
/// covers at most `2m` layers from the anchor's layer. Returns `None`
/// unless at least two CX gates are collected.
pub fn check_cascade(
    c: &QCircuit,
    lv: &LayeredView,
    start: usize,
    direction: Direction,
) -> Option<CascadeMatch> {
    let done: Vec<bool> = (0..c.len()).map(|i| i < start).collect();
    scan(c, lv, start, direction, &done)
}

fn scan(
    c: &QCircuit,
    lv: &LayeredView,
    start: usize,
    direction: Direction,
    done: &[bool],
) -> Option<CascadeMatch> {
    let anchor = &c.gates[start];
    if !anchor.is_cx() {
        return None;
    }
    let roles = |g: &Gate| match direction {
        Direction::Plain => (g.target(), g.control()),
        Direction::Inverted => (g.control(), g.target()),
    };
    let key = roles(anchor).0;
    let window_end = lv.layer_of[start] + 2 * c.num_qubits;

    let mut used = vec![false; c.num_qubits];
    let mut off_limits = vec![false; c.num_qubits];
    used[key] = true;
    let mut ctrls = Vec::new();
    let mut cx_gates = Vec::new();
    let mut before = Vec::new();
    let mut after = Vec::new();

    for (i, g) in c.gates.iter().enumerate().skip(start) {
        if done[i] {
            continue;
        }
        if lv.layer_of[i] >= window_end {
            break;
        }
        if g.is_cx() {
            let (shared, other) = roles(g);
            if shared == key {
                if used[other] || off_limits[other] {
                    break;
                }
                used[other] = true;
                ctrls.push(other);
                cx_gates.push(i);
            } else if other == key {
                break;
            } else {
                for &q in &g.qubits {
                    used[q] = true;
                    off_limits[q] = true;
                }
            }
        } else if g.kind.is_single_qubit_unitary() {
            let q = g.qubits[0];
            if off_limits[q] {
                continue;
            }
            if q == key {
                after.push(i);
                break;
            }
            if used[q] {
                after.push(i);
                off_limits[q] = true;
            } else {
                before.push(i);
            }
        } else {
            if g.acts_on(key) {
                break;
            }
            for &q in &g.qubits {
                used[q] = true;
                off_limits[q] = true;
            }
        }
    }

    if cx_gates.len() < 2 {
        return None;
    }
    // A trailing gate on the key that ended the scan still belongs to the
    // match; single-qubit gates on untouched wires only matter if they sit
    // before the last collected CX.
    let last_cx = *cx_gates.last().unwrap();
    before.retain(|&b| b < last_cx);
    let mut skip: BTreeSet<usize> = cx_gates.iter().copied().collect();
    skip.extend(before.iter().copied());
    skip.extend(after.iter().copied());
    ctrls.sort_unstable();
    Some(CascadeMatch {
        direction,
        target: key,
        ctrls,
        cx_gates,
        before,
        after,
        skip,
        last: lv.layer_of[start],
    })
}

/// Nearest-neighbour form of the fan-in cascade `prod_i CX(ctrls[i], target)`.
///
/// The qubits `ctrls ∪ {target}` are taken in ascending order and treated
/// as a line. Controls on each side of the target fold their parity towards
/// it with a down-sweep, the one or two CX into the target apply it, and the
/// mirrored up-sweep restores the controls. With the target at one end of
/// the line this is `2k - 1` gates for `k` controls; a target inside the
/// line needs `2k - 2`.
pub fn nn_decompose(ctrls: &[usize], target: usize) -> Result<Vec<Gate>, PatternError> {
    if ctrls.len() < 2 {
        return Err(PatternError::TooFewControls(ctrls.len()));
    }
    let mut line: Vec<usize> = ctrls.to_vec();
    line.sort_unstable();
    for w in line.windows(2) {
        if w[0] == w[1] {
            return Err(PatternError::RepeatedQubit(w[0]));
        }
    }
    if line.binary_search(&target).is_ok() {
        return Err(PatternError::RepeatedQubit(target));
    }
    let split = line.partition_point(|&q| q < target);
    let (below, above) = line.split_at(split);

    let mut down = Vec::new();
    for w in below.windows(2) {
        down.push(Gate::cx(w[0], w[1]));
    }
    for w in above.windows(2).rev() {
        down.push(Gate::cx(w[1], w[0]));
    }
    let mut out = down.clone();
    if let Some(&q) = below.last() {
        out.push(Gate::cx(q, target));
    }
    if let Some(&q) = above.first() {
        out.push(Gate::cx(q, target));
    }
    out.extend(down.into_iter().rev());
    Ok(out)
}

/// Rewrites the region of `c` covered by `m`, Hadamard-conjugating every
/// CX of an inverted match. A match without CX gates leaves `c` unchanged.
pub fn invert_cascade_region(c: &QCircuit, m: &CascadeMatch) -> QCircuit {
    if m.cx_gates.is_empty() {
        return c.clone();
    }
    let conjugated = CascadeMatch {
        direction: Direction::Inverted,
        ..m.clone()
    };
    apply_match(c, &conjugated)
}

/// Replaces the gates consumed by `m` with its rewrite, placed at the
/// anchor.
pub fn apply_match(c: &QCircuit, m: &CascadeMatch) -> QCircuit {
    let mut out = Vec::with_capacity(c.len());
    for (i, g) in c.gates.iter().enumerate() {
        if i == m.anchor() {
            out.extend(m.replacement(c));
        } else if !m.skip.contains(&i) {
            out.push(g.clone());
        }
    }
    c.with_same_registers(out)
}

/// Replaces every detected cascade, plain or inverted, by its
/// nearest-neighbour decomposition.
///
/// Gates are visited in list order. At each unconsumed CX both directions
/// are tried; the match covering more CX gates wins, plain on ties.
pub fn patterns(c: &QCircuit) -> QCircuit {
    let lv = c.layers();
    let mut done = vec![false; c.len()];
    let mut out = Vec::with_capacity(c.len());
    for i in 0..c.len() {
        if done[i] {
            continue;
        }
        let g = &c.gates[i];
        if g.kind == GateKind::Cx {
            let plain = scan(c, &lv, i, Direction::Plain, &done);
            let inverted = scan(c, &lv, i, Direction::Inverted, &done);
            let best = match (plain, inverted) {
                (Some(p), Some(v)) if v.cx_gates.len() > p.cx_gates.len() => Some(v),
                (Some(p), _) => Some(p),
                (None, v) => v,
            };
            if let Some(m) = best {
                out.extend(m.replacement(c));
                for &s in &m.skip {
                    done[s] = true;
                }
                continue;
            }
        }
        out.push(g.clone());
        done[i] = true;
    }
    c.with_same_registers(out)
}
