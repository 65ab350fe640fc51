//! End-to-end compilation: cascade rewriting, cancellation, chain layout
//! and routing, with optional equivalence checking.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::cancel::gate_cancellation;
use crate::cascade::patterns;
use crate::chain::{chain_with, initial_layout, Chain, ChainError, ChainOptions};
use crate::circuit::{metrics, Metrics, QCircuit};
use crate::coupling::CouplingMap;
use crate::oracle::{self, OracleError};
use crate::route::{route, RouteError, RoutedCircuit};

pub const UNITARY_TOL: f64 = 1e-10;
pub const STATEVECTOR_TOL: f64 = 1e-8;
pub const STATEVECTOR_TRIALS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Pass {
    Patterns,
    Cancel,
    Layout,
    Route,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum VerifyMode {
    #[default]
    Off,
    Unitary,
    Statevector,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ReportFormat {
    #[default]
    Text,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineConfig {
    /// Passes in execution order.
    pub passes: Vec<Pass>,
    pub verify: VerifyMode,
    pub report_format: ReportFormat,
    /// Seeds the random states of statevector checks.
    pub seed: u64,
    pub chain: ChainOptions,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            passes: vec![Pass::Patterns, Pass::Cancel, Pass::Layout, Pass::Route],
            verify: VerifyMode::Off,
            report_format: ReportFormat::Text,
            seed: 0,
            chain: ChainOptions::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid pipeline: {0}")]
    Config(String),
    #[error(transparent)]
    Layout(#[from] ChainError),
    #[error(transparent)]
    Route(#[from] RouteError),
    #[error("verification could not run: {0}")]
    Oracle(#[from] OracleError),
    #[error("compiled circuit is not equivalent to the input")]
    NotEquivalent,
}

#[derive(Debug, Clone)]
pub struct CompileResult {
    /// Compiled circuit; over physical qubits once a layout has been applied.
    pub circuit: QCircuit,
    pub initial: Metrics,
    pub compiled: Metrics,
    pub chain: Option<Chain>,
    pub routed: Option<RoutedCircuit>,
    pub swap_count: usize,
    /// `None` when verification is off.
    pub verified: Option<bool>,
    pub elapsed: Duration,
}

impl PipelineConfig {
    pub fn validate(&self, num_qubits: usize) -> Result<(), PipelineError> {
        let pos = |p| self.passes.iter().position(|&x| x == p);
        match (pos(Pass::Layout), pos(Pass::Route)) {
            (None, Some(_)) => return Err(PipelineError::Config("route requires layout".into())),
            (Some(l), Some(r)) if r < l => {
                return Err(PipelineError::Config("route must come after layout".into()))
            }
            _ => {}
        }
        if let Some(l) = pos(Pass::Layout) {
            if self.passes[l + 1..]
                .iter()
                .any(|p| matches!(p, Pass::Patterns | Pass::Cancel))
            {
                return Err(PipelineError::Config("rewrites must precede layout".into()));
            }
        }
        if self.verify == VerifyMode::Unitary && num_qubits > oracle::MAX_UNITARY_QUBITS {
            return Err(PipelineError::Config(format!(
                "unitary verification supports at most {} qubits, circuit has {num_qubits}",
                oracle::MAX_UNITARY_QUBITS
            )));
        }
        Ok(())
    }
}

pub fn compile(c: &QCircuit, g: &CouplingMap, cfg: &PipelineConfig) -> Result<CompileResult, PipelineError> {
    cfg.validate(c.num_qubits)?;
    let started = Instant::now();
    let mut work = c.clone();
    let mut chain = None;
    let mut routed = None;
    let mut placed = None;
    for pass in &cfg.passes {
        match pass {
            Pass::Patterns => work = patterns(&work),
            Pass::Cancel => work = gate_cancellation(&work),
            Pass::Layout => {
                let ch = chain_with(g, work.num_qubits, cfg.chain)?;
                placed = Some(initial_layout(&ch, work.num_qubits)?);
                chain = Some(ch);
            }
            Pass::Route => {
                let l0 = placed.as_ref().expect("validated");
                routed = Some(route(&work, l0, g)?);
            }
        }
    }
    // The virtual circuit the rewrites produced, before placement.
    let rewritten = work.clone();
    let circuit = match (&routed, &placed) {
        (Some(r), _) => r.circuit.clone(),
        (None, Some(l0)) => QCircuit {
            num_qubits: g.n(),
            gates: work.gates.iter().map(|x| x.remapped(|v| l0.phys(v))).collect(),
            ..work
        },
        _ => work,
    };
    let elapsed = started.elapsed();

    let verified = match cfg.verify {
        VerifyMode::Off => None,
        mode => {
            let ok = check(c, &rewritten, routed.as_ref(), mode, cfg.seed)?;
            if !ok {
                return Err(PipelineError::NotEquivalent);
            }
            Some(true)
        }
    };

    Ok(CompileResult {
        initial: metrics(c),
        compiled: metrics(&circuit),
        swap_count: routed.as_ref().map_or(0, |r| r.swap_count),
        circuit,
        chain,
        routed,
        verified,
        elapsed,
    })
}

/// Compares the input with the rewritten circuit and, if routed, the
/// rewritten circuit with its routing.
fn check(
    input: &QCircuit,
    rewritten: &QCircuit,
    routed: Option<&RoutedCircuit>,
    mode: VerifyMode,
    seed: u64,
) -> Result<bool, PipelineError> {
    let same = |a: &QCircuit, b: &QCircuit, perm: &[usize]| -> Result<bool, OracleError> {
        match mode {
            VerifyMode::Unitary => oracle::equivalent(a, b, perm, UNITARY_TOL),
            _ => oracle::statevector_check(a, b, perm, STATEVECTOR_TRIALS, seed, STATEVECTOR_TOL),
        }
    };
    let identity: Vec<usize> = (0..input.num_qubits).collect();
    if !same(rewritten, input, &identity)? {
        return Ok(false);
    }
    if let Some(r) = routed {
        let (a, b, perm) = r.compacted(rewritten);
        if mode == VerifyMode::Unitary && a.num_qubits > oracle::MAX_UNITARY_QUBITS {
            return Ok(oracle::statevector_check(&a, &b, &perm, STATEVECTOR_TRIALS, seed, STATEVECTOR_TOL)?);
        }
        return Ok(same(&a, &b, &perm)?);
    }
    Ok(true)
}

pub const CSV_HEADER: &str = "name,m,cnot_in,cnot_out,depth_in,depth_out,swaps,ms";

/// One CSV row (no trailing newline) in [`CSV_HEADER`] order.
pub fn csv_row(name: &str, num_qubits: usize, r: &CompileResult, timing: bool) -> String {
    let ms = if timing {
        format!("{:.3}", r.elapsed.as_secs_f64() * 1e3)
    } else {
        "0".into()
    };
    format!(
        "{name},{num_qubits},{},{},{},{},{},{ms}",
        r.initial.cnot_count, r.compiled.cnot_count, r.initial.cnot_depth, r.compiled.cnot_depth, r.swap_count
    )
}

pub fn report(name: &str, num_qubits: usize, r: &CompileResult, format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => format!("{CSV_HEADER}\n{}\n", csv_row(name, num_qubits, r, true)),
        ReportFormat::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "circuit {name} ({num_qubits} qubits)");
            let _ = writeln!(
                s,
                "initial cnot_count={} cnot_depth={}",
                r.initial.cnot_count, r.initial.cnot_depth
            );
            let _ = writeln!(
                s,
                "final cnot_count={} cnot_depth={}",
                r.compiled.cnot_count, r.compiled.cnot_depth
            );
            let _ = writeln!(s, "swaps={}", r.swap_count);
            if let Some(v) = r.verified {
                let _ = writeln!(s, "verified={v}");
            }
            let _ = writeln!(s, "time_ms={:.3}", r.elapsed.as_secs_f64() * 1e3);
            s
        }
    }
}
