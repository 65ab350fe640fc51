//! Dense state-vector / unitary simulation used to check that rewrites and
//! routing preserve circuit semantics.
//!
//! Basis convention: qubit 0 is the least significant bit of a basis
//! index, so `|q_{m-1} ... q_1 q_0>` has index `sum q_k 2^k`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::circuit::QCircuit;
use crate::gate::{Gate, GateKind};

/// Largest width for dense unitaries.
pub const MAX_UNITARY_QUBITS: usize = 7;
/// Largest width for state-vector comparisons.
pub const MAX_STATEVECTOR_QUBITS: usize = 14;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("{got} qubits exceeds the simulator limit of {limit}")]
    TooManyQubits { got: usize, limit: usize },
    #[error("circuit contains a measurement (gate {0})")]
    Measurement(usize),
    #[error("gate {index} (`{name}`) has no known matrix")]
    UnknownGate { index: usize, name: String },
    #[error("width mismatch: {0} vs {1} qubits")]
    DimensionMismatch(usize, usize),
    #[error("permutation of length {got} does not match {expected} qubits")]
    BadPermutation { expected: usize, got: usize },
}

type Mat2 = [[Complex64; 2]; 2];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn u3(theta: f64, phi: f64, lambda: f64) -> Mat2 {
    let (s, co) = (theta / 2.0).sin_cos();
    [
        [c(co, 0.0), -Complex64::from_polar(s, lambda)],
        [Complex64::from_polar(s, phi), Complex64::from_polar(co, phi + lambda)],
    ]
}

fn single_qubit_matrix(g: &Gate) -> Option<Mat2> {
    use GateKind::*;
    let o = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let p = &g.params;
    Some(match g.kind {
        H => [[c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)], [c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)]],
        X => [[o, one], [one, o]],
        Y => [[o, c(0.0, -1.0)], [c(0.0, 1.0), o]],
        Z => [[one, o], [o, -one]],
        S => [[one, o], [o, c(0.0, 1.0)]],
        Sdg => [[one, o], [o, c(0.0, -1.0)]],
        T => [[one, o], [o, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)]],
        Tdg => [[one, o], [o, Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4)]],
        Rx => {
            let (s, co) = (p[0] / 2.0).sin_cos();
            [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
        }
        Ry => {
            let (s, co) = (p[0] / 2.0).sin_cos();
            [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
        }
        Rz => [
            [Complex64::from_polar(1.0, -p[0] / 2.0), o],
            [o, Complex64::from_polar(1.0, p[0] / 2.0)],
        ],
        U1 => [[one, o], [o, Complex64::from_polar(1.0, p[0])]],
        U2 => u3(std::f64::consts::FRAC_PI_2, p[0], p[1]),
        U3 => u3(p[0], p[1], p[2]),
        _ => return None,
    })
}

/// Dense state vector over `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub num_qubits: usize,
    pub amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero(num_qubits: usize) -> Self {
        let mut amps = vec![c(0.0, 0.0); 1 << num_qubits];
        amps[0] = c(1.0, 0.0);
        StateVector { num_qubits, amps }
    }

    pub fn basis(num_qubits: usize, index: usize) -> Self {
        let mut amps = vec![c(0.0, 0.0); 1 << num_qubits];
        amps[index] = c(1.0, 0.0);
        StateVector { num_qubits, amps }
    }

    /// Tensor product of one single-qubit state per qubit.
    pub fn product(factors: &[[Complex64; 2]]) -> Self {
        let n = factors.len();
        let amps = (0..1usize << n)
            .map(|idx| {
                factors
                    .iter()
                    .enumerate()
                    .map(|(q, f)| f[(idx >> q) & 1])
                    .product()
            })
            .collect();
        StateVector { num_qubits: n, amps }
    }

    fn apply_1q(&mut self, q: usize, m: &Mat2) {
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn apply_cx(&mut self, control: usize, target: usize) {
        let (cb, tb) = (1usize << control, 1usize << target);
        for i in 0..self.amps.len() {
            if i & cb != 0 && i & tb == 0 {
                self.amps.swap(i, i | tb);
            }
        }
    }

    fn apply_swap(&mut self, a: usize, b: usize) {
        let (ab, bb) = (1usize << a, 1usize << b);
        for i in 0..self.amps.len() {
            if i & ab != 0 && i & bb == 0 {
                self.amps.swap(i, (i & !ab) | bb);
            }
        }
    }

    /// Applies one gate; measurement and opaque gates are errors.
    pub fn apply(&mut self, index: usize, g: &Gate) -> Result<(), OracleError> {
        match g.kind {
            GateKind::Cx => self.apply_cx(g.qubits[0], g.qubits[1]),
            GateKind::Swap => self.apply_swap(g.qubits[0], g.qubits[1]),
            GateKind::Barrier => {}
            GateKind::Measure => return Err(OracleError::Measurement(index)),
            _ => match single_qubit_matrix(g) {
                Some(m) => self.apply_1q(g.qubits[0], &m),
                None => {
                    return Err(OracleError::UnknownGate {
                        index,
                        name: g.name().to_string(),
                    })
                }
            },
        }
        Ok(())
    }

    pub fn run(&mut self, c: &QCircuit) -> Result<(), OracleError> {
        if c.num_qubits != self.num_qubits {
            return Err(OracleError::DimensionMismatch(c.num_qubits, self.num_qubits));
        }
        for (i, g) in c.gates.iter().enumerate() {
            self.apply(i, g)?;
        }
        Ok(())
    }

    /// Moves the content of qubit `k` to qubit `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> StateVector {
        let mut amps = vec![c(0.0, 0.0); self.amps.len()];
        for (idx, a) in self.amps.iter().enumerate() {
            amps[permute_index(idx, perm)] = *a;
        }
        StateVector { num_qubits: self.num_qubits, amps }
    }
}

fn permute_index(idx: usize, perm: &[usize]) -> usize {
    perm.iter()
        .enumerate()
        .fold(0, |acc, (k, &to)| acc | (((idx >> k) & 1) << to))
}

/// Dense unitary, stored column by column: `columns[j]` is `U|j>`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    pub num_qubits: usize,
    pub columns: Vec<Vec<Complex64>>,
}

impl UnitaryMatrix {
    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn identity(num_qubits: usize) -> Self {
        let d = 1 << num_qubits;
        UnitaryMatrix {
            num_qubits,
            columns: (0..d).map(|j| StateVector::basis(num_qubits, j).amps).collect(),
        }
    }

    /// Row-major entry `U[row][col]`.
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.columns[col][row]
    }

    /// `|| U^dagger U - I ||_F`.
    pub fn unitarity_defect(&self) -> f64 {
        let d = self.dim();
        let mut acc = 0.0;
        for i in 0..d {
            for j in 0..d {
                let dot: Complex64 = (0..d).map(|k| self.columns[i][k].conj() * self.columns[j][k]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                acc += (dot - expect).norm_sqr();
            }
        }
        acc.sqrt()
    }

    fn permuted(&self, perm: &[usize]) -> UnitaryMatrix {
        UnitaryMatrix {
            num_qubits: self.num_qubits,
            columns: self
                .columns
                .iter()
                .map(|col| {
                    StateVector { num_qubits: self.num_qubits, amps: col.clone() }
                        .permuted(perm)
                        .amps
                })
                .collect(),
        }
    }
}

/// Unitary of a measurement-free circuit of at most
/// [`MAX_UNITARY_QUBITS`] qubits.
pub fn unitary(c: &QCircuit) -> Result<UnitaryMatrix, OracleError> {
    if c.num_qubits > MAX_UNITARY_QUBITS {
        return Err(OracleError::TooManyQubits { got: c.num_qubits, limit: MAX_UNITARY_QUBITS });
    }
    let d = 1usize << c.num_qubits;
    let mut columns = Vec::with_capacity(d);
    for j in 0..d {
        let mut sv = StateVector::basis(c.num_qubits, j);
        sv.run(c)?;
        columns.push(sv.amps);
    }
    Ok(UnitaryMatrix { num_qubits: c.num_qubits, columns })
}

/// Frobenius distance between `a` and `b` after removing the global phase,
/// which is fixed on the largest-magnitude entry of `a`.
fn phase_distance<'a>(a: impl Iterator<Item = &'a Complex64> + Clone, b: impl Iterator<Item = &'a Complex64> + Clone) -> f64 {
    let (mut best, mut pa, mut pb) = (-1.0, c(1.0, 0.0), c(1.0, 0.0));
    for (x, y) in a.clone().zip(b.clone()) {
        let n = x.norm_sqr();
        if n > best {
            best = n;
            pa = *x;
            pb = *y;
        }
    }
    let phase = if pb.norm() > 0.0 && pa.norm() > 0.0 {
        let r = pa / pb;
        r / r.norm()
    } else {
        c(1.0, 0.0)
    };
    a.zip(b)
        .map(|(x, y)| (*x - phase * *y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn check_perm(perm: &[usize], n: usize) -> Result<(), OracleError> {
    let mut seen = vec![false; n];
    if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
        return Err(OracleError::BadPermutation { expected: n, got: perm.len() });
    }
    Ok(())
}

/// True iff `P(perm) U_b` equals `U_a` up to a global phase within `tol`
/// (Frobenius norm). `perm[k]` is where qubit `k` of `b` ends up.
pub fn equivalent(a: &QCircuit, b: &QCircuit, perm: &[usize], tol: f64) -> Result<bool, OracleError> {
    if a.num_qubits != b.num_qubits {
        return Err(OracleError::DimensionMismatch(a.num_qubits, b.num_qubits));
    }
    check_perm(perm, a.num_qubits)?;
    let ua = unitary(a)?;
    let ub = unitary(b)?.permuted(perm);
    let d = phase_distance(ua.columns.iter().flatten(), ub.columns.iter().flatten());
    Ok(d <= tol)
}

/// Random product state with independently drawn Bloch angles per qubit.
fn random_product_state(n: usize, rng: &mut ChaCha8Rng) -> StateVector {
    let factors: Vec<[Complex64; 2]> = (0..n)
        .map(|_| {
            let theta: f64 = rng.gen_range(0.0..std::f64::consts::PI);
            let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            [c((theta / 2.0).cos(), 0.0), Complex64::from_polar((theta / 2.0).sin(), phi)]
        })
        .collect();
    StateVector::product(&factors)
}

/// Compares `a` against `P(perm) b` on `trials` seeded random product
/// states, up to global phase. Amplitude distance uses the 2-norm.
pub fn statevector_check(
    a: &QCircuit,
    b: &QCircuit,
    perm: &[usize],
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<bool, OracleError> {
    let n = a.num_qubits;
    if n != b.num_qubits {
        return Err(OracleError::DimensionMismatch(n, b.num_qubits));
    }
    if n > MAX_STATEVECTOR_QUBITS {
        return Err(OracleError::TooManyQubits { got: n, limit: MAX_STATEVECTOR_QUBITS });
    }
    check_perm(perm, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let input = random_product_state(n, &mut rng);
        let mut sa = input.clone();
        sa.run(a)?;
        let mut sb = input;
        sb.run(b)?;
        let sb = sb.permuted(perm);
        if phase_distance(sa.amps.iter(), sb.amps.iter()) > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circ(m: usize, gates: Vec<Gate>) -> QCircuit {
        QCircuit::with_gates("t", m, gates)
    }

    fn id(n: usize) -> Vec<usize> {
        (0..n).collect()
    }

    #[test]
    fn empty_circuit_is_identity() {
        assert_eq!(unitary(&circ(1, vec![])).unwrap(), UnitaryMatrix::identity(1));
    }

    #[test]
    fn double_hadamard_is_identity() {
        let u = unitary(&circ(1, vec![Gate::h(0), Gate::h(0)])).unwrap();
        let i = UnitaryMatrix::identity(1);
        let d: f64 = u.columns.iter().flatten().zip(i.columns.iter().flatten()).map(|(a, b)| (a - b).norm_sqr()).sum();
        assert!(d.sqrt() < 1e-12);
    }

    #[test]
    fn bell_state() {
        let mut sv = StateVector::zero(2);
        sv.run(&circ(2, vec![Gate::h(0), Gate::cx(0, 1)])).unwrap();
        let r = FRAC_1_SQRT_2;
        let want = [r, 0.0, 0.0, r];
        for (a, w) in sv.amps.iter().zip(want) {
            assert!((a - c(w, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn cx_basis_action_is_little_endian() {
        // control qubit 0 set: |01> (index 1) -> |11> (index 3)
        let u = unitary(&circ(2, vec![Gate::cx(0, 1)])).unwrap();
        assert_eq!(u.get(3, 1), c(1.0, 0.0));
        assert_eq!(u.get(2, 2), c(1.0, 0.0));
    }

    #[test]
    fn hadamard_conjugation_reverses_cx() {
        let a = circ(2, vec![Gate::cx(0, 1)]);
        let b = circ(
            2,
            vec![Gate::h(0), Gate::h(1), Gate::cx(1, 0), Gate::h(0), Gate::h(1)],
        );
        assert!(equivalent(&a, &b, &id(2), 1e-10).unwrap());
        assert!(!equivalent(&a, &circ(2, vec![Gate::cx(1, 0)]), &id(2), 1e-10).unwrap());
    }

    #[test]
    fn global_phase_is_ignored() {
        // RZ(theta) = e^{-i theta/2} U1(theta)
        let a = circ(1, vec![Gate::rz(0.7, 0)]);
        let b = circ(1, vec![Gate::new(GateKind::U1, vec![0], vec![0.7])]);
        assert!(equivalent(&a, &b, &id(1), 1e-10).unwrap());
    }

    #[test]
    fn swap_equals_permutation() {
        let a = circ(2, vec![Gate::h(0), Gate::swap(0, 1)]);
        let b = circ(2, vec![Gate::h(0)]);
        assert!(equivalent(&a, &b, &[1, 0], 1e-10).unwrap());
        assert!(!equivalent(&a, &b, &id(2), 1e-10).unwrap());
    }

    #[test]
    fn rotations_are_unitary() {
        let c = circ(
            3,
            vec![
                Gate::ry(0.3, 0),
                Gate::rz(1.1, 1),
                Gate::new(GateKind::U3, vec![2], vec![0.2, 0.4, 0.6]),
                Gate::new(GateKind::U2, vec![0], vec![0.1, 0.9]),
                Gate::new(GateKind::Rx, vec![1], vec![2.0]),
                Gate::cx(2, 0),
            ],
        );
        assert!(unitary(&c).unwrap().unitarity_defect() < 1e-10);
    }

    #[test]
    fn limits_and_errors() {
        assert!(matches!(unitary(&circ(8, vec![])), Err(OracleError::TooManyQubits { .. })));
        assert_eq!(
            unitary(&circ(1, vec![Gate::measure(0, 0)])),
            Err(OracleError::Measurement(0))
        );
        assert!(matches!(
            equivalent(&circ(1, vec![]), &circ(2, vec![]), &id(1), 1e-10),
            Err(OracleError::DimensionMismatch(1, 2))
        ));
        assert!(matches!(
            statevector_check(&circ(15, vec![]), &circ(15, vec![]), &id(15), 1, 0, 1e-8),
            Err(OracleError::TooManyQubits { .. })
        ));
    }

    #[test]
    fn statevector_check_detects_a_missing_gate() {
        let a = circ(3, vec![Gate::h(0), Gate::cx(0, 1), Gate::h(2), Gate::cx(1, 2)]);
        let mut b = a.clone();
        b.gates.remove(2);
        assert!(statevector_check(&a, &a, &id(3), 4, 7, 1e-8).unwrap());
        assert!(!statevector_check(&a, &b, &id(3), 4, 7, 1e-8).unwrap());
    }
}
