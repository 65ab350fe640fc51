mod common;

use nnchain::cancel::{cnot_cancellation, gate_cancellation};
use nnchain::cascade::patterns;
use nnchain::chain::{chain, initial_layout};
use nnchain::oracle::{equivalent, statevector_check, unitary};
use nnchain::pipeline::{compile, PipelineConfig};
use nnchain::route::route;
use nnchain::{emit_qasm, parse_qasm, Gate, QCircuit};
use proptest::prelude::*;

fn ident(m: usize) -> Vec<usize> {
    (0..m).collect()
}

fn small_circuit() -> impl Strategy<Value = QCircuit> {
    (2usize..=5, 0usize..40, any::<u64>()).prop_map(|(m, len, seed)| common::random_circuit(m, len, seed))
}

/// Circuits rich in CX cascades and H pairs.
fn cascade_heavy() -> impl Strategy<Value = QCircuit> {
    (3usize..=5, prop::collection::vec((0usize..5, 0usize..5, 0u8..4), 0..30)).prop_map(|(m, ops)| {
        let mut c = QCircuit::new("cascades", m);
        for (a, b, kind) in ops {
            let (a, b) = (a % m, b % m);
            match kind {
                0 | 1 if a != b => c.push(Gate::cx(a, b)),
                2 => c.push(Gate::h(a)),
                _ => c.push(Gate::rz(0.25 * (a + 1) as f64, b)),
            }
        }
        c
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn qasm_round_trip(c in small_circuit()) {
        let text = emit_qasm(&c).unwrap();
        let back = parse_qasm(&text).unwrap();
        prop_assert_eq!(&back.gates, &c.gates);
        prop_assert_eq!(emit_qasm(&back).unwrap(), text);
    }

    #[test]
    fn layers_partition_gates_asap(c in small_circuit()) {
        let lv = c.layers();
        let mut all: Vec<usize> = lv.layers.iter().flatten().copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, ident(c.len()));
        let dag = c.dag();
        for i in 0..c.len() {
            let want = dag.predecessors(i).map(|p| lv.layer_of[p] + 1).max().unwrap_or(0);
            prop_assert_eq!(lv.layer_of[i], want);
        }
        for layer in &lv.layers {
            let mut qs: Vec<usize> = layer.iter().flat_map(|&i| c.gates[i].qubits.clone()).collect();
            let n = qs.len();
            qs.sort_unstable();
            qs.dedup();
            prop_assert_eq!(qs.len(), n);
        }
    }

    #[test]
    fn patterns_preserve_the_unitary(c in cascade_heavy()) {
        let out = patterns(&c);
        prop_assert!(equivalent(&c, &out, &ident(c.num_qubits), 1e-10).unwrap());
    }

    #[test]
    fn patterns_on_random_circuits(c in small_circuit()) {
        let out = patterns(&c);
        prop_assert!(equivalent(&c, &out, &ident(c.num_qubits), 1e-10).unwrap());
    }

    #[test]
    fn cancellation_is_a_sound_fixed_point(c in cascade_heavy()) {
        for f in [gate_cancellation, cnot_cancellation] {
            let once = f(&c);
            prop_assert_eq!(f(&once), once.clone());
            prop_assert!(once.len() <= c.len());
            prop_assert!(once.cx_count() <= c.cx_count());
            prop_assert!(equivalent(&c, &once, &ident(c.num_qubits), 1e-10).unwrap());
        }
    }

    #[test]
    fn chain_walk_is_a_path(n in 2usize..30, extra in 0usize..20, seed in any::<u64>()) {
        let g = common::random_connected(n, extra, seed);
        let c = chain(&g, 1).unwrap();
        for w in c.order.windows(2) {
            prop_assert!(g.is_edge(w[0], w[1]));
        }
        prop_assert_eq!(chain(&g, 1).unwrap(), c);
    }

    #[test]
    fn expanded_chain_has_distinct_nodes(n in 2usize..30, extra in 0usize..20, seed in any::<u64>(), frac in 0.0f64..=1.0) {
        let g = common::random_connected(n, extra, seed);
        let m = ((n as f64 * frac) as usize).max(1);
        if let Ok(c) = chain(&g, m) {
            prop_assert!(c.order.len() >= m);
            let mut seen = c.order.clone();
            seen.sort_unstable();
            seen.dedup();
            prop_assert_eq!(seen.len(), c.order.len());
            prop_assert!(c.order.iter().all(|q| !c.isolated.contains(q)));
        }
    }

    #[test]
    fn routing_is_compliant_and_sound(c in small_circuit(), extra in 0usize..4, seed in any::<u64>()) {
        let g = common::random_connected(6, extra, seed);
        let l0 = initial_layout(&chain(&g, c.num_qubits).unwrap(), c.num_qubits).unwrap();
        let r = route(&c, &l0, &g).unwrap();
        prop_assert!(r.violations(&g).is_empty());
        prop_assert!(r.verify(&c, 1e-10).unwrap());
        prop_assert_eq!(route(&c, &l0, &g).unwrap(), r);
    }

    #[test]
    fn statevector_agrees_with_dense(a in small_circuit(), flip in any::<bool>()) {
        let mut b = a.clone();
        if flip {
            b.push(Gate::h(0));
        }
        let perm = ident(a.num_qubits);
        let dense = equivalent(&a, &b, &perm, 1e-10).unwrap();
        let sampled = statevector_check(&a, &b, &perm, 4, 3, 1e-8).unwrap();
        prop_assert_eq!(dense, sampled);
    }

    #[test]
    fn unitaries_are_unitary(c in small_circuit()) {
        prop_assert!(unitary(&c).unwrap().unitarity_defect() < 1e-10);
    }

    #[test]
    fn pipeline_is_deterministic(c in small_circuit()) {
        let g = common::map("heavyhex7");
        let cfg = PipelineConfig::default();
        let a = emit_qasm(&compile(&c, &g, &cfg).unwrap().circuit).unwrap();
        let b = emit_qasm(&compile(&c, &g, &cfg).unwrap().circuit).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn equivalence_is_symmetric_and_transitive() {
    for seed in 0..20 {
        let a = common::random_circuit(3, 15, seed);
        let b = gate_cancellation(&patterns(&a));
        let c = patterns(&b);
        let id = ident(3);
        assert!(equivalent(&a, &b, &id, 1e-10).unwrap());
        assert!(equivalent(&b, &a, &id, 1e-10).unwrap());
        assert!(equivalent(&b, &c, &id, 1e-10).unwrap());
        assert!(equivalent(&a, &c, &id, 1e-10).unwrap());
    }
}
