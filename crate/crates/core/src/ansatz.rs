//! RyRz hardware-efficient ansatz circuits with full entanglement.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::circuit::QCircuit;
use crate::gate::Gate;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnsatzError {
    #[error("expected {expected} angles for {m} qubits and {blocks} blocks, got {got}")]
    AngleCount {
        m: usize,
        blocks: usize,
        expected: usize,
        got: usize,
    },
    #[error("an ansatz needs at least one qubit")]
    NoQubits,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RyRzSpec {
    pub m: usize,
    pub blocks: usize,
    /// Per rotation layer: `m` RY angles then `m` RZ angles. Drawn from
    /// `seed` when `None`.
    pub angles: Option<Vec<f64>>,
    pub seed: u64,
    /// Order each entangling block as fan-in cascades (target ascending)
    /// instead of fan-outs.
    pub fan_in: bool,
}

impl RyRzSpec {
    pub fn new(m: usize, blocks: usize) -> Self {
        RyRzSpec {
            m,
            blocks,
            angles: None,
            seed: 0,
            fan_in: false,
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn fan_in(mut self, fan_in: bool) -> Self {
        self.fan_in = fan_in;
        self
    }

    pub fn angles(mut self, angles: Vec<f64>) -> Self {
        self.angles = Some(angles);
        self
    }

    pub fn angle_count(&self) -> usize {
        2 * self.m * (self.blocks + 1)
    }
}

pub fn gen_ryrz(spec: &RyRzSpec) -> Result<QCircuit, AnsatzError> {
    let m = spec.m;
    if m == 0 {
        return Err(AnsatzError::NoQubits);
    }
    let expected = spec.angle_count();
    let angles = match &spec.angles {
        Some(a) if a.len() != expected => {
            return Err(AnsatzError::AngleCount {
                m,
                blocks: spec.blocks,
                expected,
                got: a.len(),
            })
        }
        Some(a) => a.clone(),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            (0..expected).map(|_| rng.gen_range(0.0..TAU)).collect()
        }
    };

    let mut c = QCircuit::new(format!("ryrz_{m}q_{}b", spec.blocks), m);
    let rotations = |c: &mut QCircuit, layer: usize| {
        let base = 2 * m * layer;
        for q in 0..m {
            c.push(Gate::ry(angles[base + q], q));
        }
        for q in 0..m {
            c.push(Gate::rz(angles[base + m + q], q));
        }
    };
    rotations(&mut c, 0);
    for layer in 1..=spec.blocks {
        for (i, j) in entangling_pairs(m, spec.fan_in) {
            c.push(Gate::cx(i, j));
        }
        rotations(&mut c, layer);
    }
    Ok(c)
}

/// All `(control, target)` pairs with `control < target`, grouped by
/// control (fan-out) or by target (fan-in).
fn entangling_pairs(m: usize, fan_in: bool) -> Vec<(usize, usize)> {
    if fan_in {
        (1..m).flat_map(|j| (0..j).map(move |i| (i, j))).collect()
    } else {
        (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_sizes() {
        for (m, cx) in [(4, 30), (12, 330), (14, 455), (20, 950)] {
            assert_eq!(gen_ryrz(&RyRzSpec::new(m, 5)).unwrap().cx_count(), cx);
        }
    }

    #[test]
    fn no_blocks_only_rotations() {
        let c = gen_ryrz(&RyRzSpec::new(2, 0)).unwrap();
        assert_eq!(c.len(), 4);
        assert_eq!(c.cx_count(), 0);
    }

    #[test]
    fn explicit_angles_are_used_in_order() {
        let angles: Vec<f64> = (0..8).map(f64::from).collect();
        let c = gen_ryrz(&RyRzSpec::new(2, 1).angles(angles)).unwrap();
        assert_eq!(c.gates[1], Gate::ry(1.0, 1));
        assert_eq!(c.gates[2], Gate::rz(2.0, 0));
        assert_eq!(c.gates[4], Gate::cx(0, 1));
        assert_eq!(c.gates[7], Gate::rz(6.0, 0));
    }

    #[test]
    fn wrong_angle_count() {
        let err = gen_ryrz(&RyRzSpec::new(2, 1).angles(vec![0.0])).unwrap_err();
        assert!(matches!(err, AnsatzError::AngleCount { expected: 8, .. }));
    }

    #[test]
    fn seeded_angles_are_reproducible() {
        let a = gen_ryrz(&RyRzSpec::new(3, 2).seed(9)).unwrap();
        let b = gen_ryrz(&RyRzSpec::new(3, 2).seed(9)).unwrap();
        let c = gen_ryrz(&RyRzSpec::new(3, 2).seed(10)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn fan_out_and_fan_in_orders() {
        let pairs = |fan_in| {
            let c = gen_ryrz(&RyRzSpec::new(4, 1).fan_in(fan_in)).unwrap();
            c.gates
                .iter()
                .filter(|g| g.is_cx())
                .map(|g| (g.control(), g.target()))
                .collect::<Vec<_>>()
        };
        assert_eq!(pairs(false), [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(pairs(true), [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3)]);
    }
}
