#![allow(dead_code)]

use std::path::{Path, PathBuf};

use nnchain::coupling::CouplingMap;
use nnchain::{parse_qasm, Gate, QCircuit};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data")
}

pub fn map(name: &str) -> CouplingMap {
    CouplingMap::from_file(data_dir().join("maps").join(format!("{name}.txt"))).unwrap()
}

/// Every bundled corpus circuit, sorted by file name.
pub fn corpus() -> Vec<(String, QCircuit)> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(data_dir().join("corpus"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "qasm"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            let c = parse_qasm(&std::fs::read_to_string(&p).unwrap())
                .unwrap_or_else(|e| panic!("{name}: {e}"));
            (name, c)
        })
        .collect()
}

/// Corpus circuits without measurements, which the simulators reject.
pub fn unitary_corpus() -> Vec<(String, QCircuit)> {
    corpus()
        .into_iter()
        .filter(|(_, c)| c.gates.iter().all(|g| g.kind != nnchain::GateKind::Measure))
        .collect()
}

/// Seeded random circuit of CX, Clifford and rotation gates.
pub fn random_circuit(m: usize, len: usize, seed: u64) -> QCircuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = QCircuit::new(format!("rand{m}_{seed}"), m);
    for _ in 0..len {
        let q = rng.gen_range(0..m);
        let roll: f64 = rng.gen();
        let g = if roll < 0.45 && m > 1 {
            let mut t = rng.gen_range(0..m - 1);
            if t >= q {
                t += 1;
            }
            Gate::cx(q, t)
        } else if roll < 0.7 {
            Gate::h(q)
        } else if roll < 0.85 {
            Gate::rz(rng.gen_range(0.0..std::f64::consts::TAU), q)
        } else {
            Gate::ry(rng.gen_range(0.0..std::f64::consts::TAU), q)
        };
        c.push(g);
    }
    c
}

/// Seeded random connected graph: a random spanning tree plus extra edges.
pub fn random_connected(n: usize, extra: usize, seed: u64) -> CouplingMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.gen_range(0..v), v));
    }
    for _ in 0..extra {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v {
            edges.push((u, v));
        }
    }
    CouplingMap::new(n, edges).unwrap()
}
