//! Pattern-oriented compiler for quantum circuits.
//!
//! The pipeline rewrites CNOT cascades (and their fan-out mirror images)
//! into nearest-neighbour CNOT sequences, removes the self-inverse pairs
//! this exposes, lays the circuit out along a chain of physically adjacent
//! qubits and finally routes whatever still needs it with a deterministic
//! SABRE-style swap search.
//!
//! ```
//! use nnchain::{ansatz::{gen_ryrz, RyRzSpec}, metrics};
//!
//! let c = gen_ryrz(&RyRzSpec::new(4, 5)).unwrap();
//! assert_eq!(metrics(&c).cnot_count, 30);
//! ```

pub mod ansatz;
pub mod cancel;
pub mod cascade;
pub mod chain;
pub mod circuit;
pub mod coupling;
pub mod gate;
pub mod oracle;
pub mod pipeline;
pub mod qasm;
pub mod route;

pub use circuit::{metrics, CircuitDag, CircuitError, LayeredView, Metrics, QCircuit};
pub use gate::{Gate, GateKind};
pub use qasm::{emit_qasm, parse_qasm, QasmError};
