use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use nnchain::ansatz::{gen_ryrz, RyRzSpec};
use nnchain::chain::{chain_with, ChainOptions};
use nnchain::coupling::CouplingMap;
use nnchain::oracle;
use nnchain::pipeline::{self, compile, Pass, PipelineConfig, PipelineError, ReportFormat, VerifyMode};
use nnchain::{emit_qasm, metrics, parse_qasm, QCircuit};

const EXIT_PARSE: u8 = 1;
const EXIT_LAYOUT: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(name = "nnchain", version, about = "Pattern-oriented quantum circuit compiler")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a QASM circuit for a coupling map.
    Compile {
        input: PathBuf,
        #[arg(long)]
        map: PathBuf,
        #[arg(long, value_enum, default_value_t = Verify::Off)]
        verify: Verify,
        /// Write the compiled QASM here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Report::Text)]
        report: Report,
        /// Comma-separated passes, in order.
        #[arg(long, value_delimiter = ',', default_value = "patterns,cancel,layout,route")]
        passes: Vec<PassArg>,
        /// Seed for statevector verification.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Try every start node for the chain.
        #[arg(long)]
        all_starts: bool,
    },
    /// Generate an RyRz ansatz circuit.
    GenRyrz {
        #[arg(long)]
        qubits: usize,
        #[arg(long)]
        blocks: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Order entangling blocks as fan-in cascades.
        #[arg(long)]
        fan_in: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the chain layout order for a coupling map.
    Chain {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        qubits: usize,
        #[arg(long)]
        all_starts: bool,
    },
    /// Print CNOT metrics of a circuit.
    Metrics { input: PathBuf },
    /// Check two circuits for equivalence up to a qubit permutation.
    Verify {
        a: PathBuf,
        b: PathBuf,
        /// Comma-separated output permutation: qubit k of `b` ends on perm[k].
        #[arg(long, value_delimiter = ',')]
        perm: Option<Vec<usize>>,
        #[arg(long, value_enum, default_value_t = Verify::Unitary)]
        mode: Verify,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compile every .qasm file in a directory and tabulate the metrics.
    Bench {
        dir: PathBuf,
        #[arg(long)]
        map: PathBuf,
        #[arg(long, value_enum, default_value_t = Report::Csv)]
        report: Report,
        /// Report 0 ms for every circuit, making the output reproducible.
        #[arg(long)]
        no_timing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Verify {
    Off,
    Unitary,
    Statevector,
}

impl From<Verify> for VerifyMode {
    fn from(v: Verify) -> Self {
        match v {
            Verify::Off => VerifyMode::Off,
            Verify::Unitary => VerifyMode::Unitary,
            Verify::Statevector => VerifyMode::Statevector,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Report {
    Text,
    Csv,
}

impl From<Report> for ReportFormat {
    fn from(r: Report) -> Self {
        match r {
            Report::Text => ReportFormat::Text,
            Report::Csv => ReportFormat::Csv,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PassArg {
    Patterns,
    Cancel,
    Layout,
    Route,
}

impl From<PassArg> for Pass {
    fn from(p: PassArg) -> Self {
        match p {
            PassArg::Patterns => Pass::Patterns,
            PassArg::Cancel => Pass::Cancel,
            PassArg::Layout => Pass::Layout,
            PassArg::Route => Pass::Route,
        }
    }
}

/// Error carrying the process exit code.
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn new(code: u8, msg: impl ToString) -> Self {
        Failure {
            code,
            msg: msg.to_string(),
        }
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        let code = match e {
            PipelineError::Layout(_) | PipelineError::Route(_) => EXIT_LAYOUT,
            PipelineError::Oracle(_) | PipelineError::NotEquivalent => EXIT_VERIFY,
            PipelineError::Config(_) => EXIT_PARSE,
        };
        Failure::new(code, e)
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn load_circuit(path: &Path) -> Result<QCircuit, Failure> {
    parse_qasm(&read(path)?).map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn load_map(path: &Path) -> Result<CouplingMap, Failure> {
    CouplingMap::parse(&read(path)?).map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn write_or_print(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn qasm_text(c: &QCircuit) -> Result<String, Failure> {
    emit_qasm(c).map_err(|e| Failure::new(EXIT_PARSE, e))
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Compile {
            input,
            map,
            verify,
            out,
            report,
            passes,
            seed,
            all_starts,
        } => {
            let c = load_circuit(&input)?;
            let g = load_map(&map)?;
            let cfg = PipelineConfig {
                passes: passes.into_iter().map(Pass::from).collect(),
                verify: verify.into(),
                report_format: report.into(),
                seed,
                chain: ChainOptions { all_starts },
            };
            let r = compile(&c, &g, &cfg)?;
            let text = qasm_text(&r.circuit)?;
            let name = input.file_stem().unwrap_or_default().to_string_lossy();
            let summary = pipeline::report(&name, c.num_qubits, &r, cfg.report_format);
            if out.is_some() {
                write_or_print(out.as_deref(), &text)?;
                print!("{summary}");
            } else {
                print!("{text}");
                eprint!("{summary}");
            }
            Ok(())
        }
        Command::GenRyrz {
            qubits,
            blocks,
            seed,
            fan_in,
            out,
        } => {
            let spec = RyRzSpec::new(qubits, blocks).seed(seed).fan_in(fan_in);
            let c = gen_ryrz(&spec).map_err(|e| Failure::new(EXIT_PARSE, e))?;
            write_or_print(out.as_deref(), &qasm_text(&c)?)
        }
        Command::Chain {
            map,
            qubits,
            all_starts,
        } => {
            let g = load_map(&map)?;
            let ch = chain_with(&g, qubits, ChainOptions { all_starts })
                .map_err(|e| Failure::new(EXIT_LAYOUT, e))?;
            let order: Vec<String> = ch.order.iter().map(|q| q.to_string()).collect();
            println!("{}", order.join(" "));
            Ok(())
        }
        Command::Metrics { input } => {
            let m = metrics(&load_circuit(&input)?);
            println!("cnot_count={} cnot_depth={}", m.cnot_count, m.cnot_depth);
            Ok(())
        }
        Command::Verify {
            a,
            b,
            perm,
            mode,
            seed,
        } => {
            let (a, b) = (load_circuit(&a)?, load_circuit(&b)?);
            let perm = perm.unwrap_or_else(|| (0..a.num_qubits).collect());
            let same = match mode {
                Verify::Statevector => oracle::statevector_check(
                    &a,
                    &b,
                    &perm,
                    pipeline::STATEVECTOR_TRIALS,
                    seed,
                    pipeline::STATEVECTOR_TOL,
                ),
                _ => oracle::equivalent(&a, &b, &perm, pipeline::UNITARY_TOL),
            }
            .map_err(|e| Failure::new(EXIT_VERIFY, e))?;
            if same {
                println!("equivalent");
                Ok(())
            } else {
                Err(Failure::new(EXIT_VERIFY, "not equivalent"))
            }
        }
        Command::Bench {
            dir,
            map,
            report,
            no_timing,
            out,
        } => {
            let g = load_map(&map)?;
            let mut paths: Vec<PathBuf> = fs::read_dir(&dir)
                .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", dir.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "qasm"))
                .collect();
            paths.sort();
            let cfg = PipelineConfig::default();
            let rows: Result<Vec<(String, String)>, Failure> = paths
                .par_iter()
                .map(|p| {
                    let name = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
                    let c = load_circuit(p)?;
                    let r = compile(&c, &g, &cfg).map_err(|e| {
                        let f = Failure::from(e);
                        Failure::new(f.code, format!("{name}: {}", f.msg))
                    })?;
                    Ok((name.clone(), pipeline::csv_row(&name, c.num_qubits, &r, !no_timing)))
                })
                .collect();
            let mut rows = rows?;
            rows.sort();
            write_or_print(out.as_deref(), &bench_table(&rows, report))
        }
    }
}

fn bench_table(rows: &[(String, String)], report: Report) -> String {
    let mut s = String::new();
    match report {
        Report::Csv => {
            let _ = writeln!(s, "{}", pipeline::CSV_HEADER);
            for (_, row) in rows {
                let _ = writeln!(s, "{row}");
            }
        }
        Report::Text => {
            let table: Vec<Vec<&str>> = std::iter::once(pipeline::CSV_HEADER)
                .chain(rows.iter().map(|(_, r)| r.as_str()))
                .map(|line| line.split(',').collect())
                .collect();
            let widths: Vec<usize> = (0..table[0].len())
                .map(|k| table.iter().map(|r| r[k].len()).max().unwrap_or(0))
                .collect();
            for row in &table {
                let cells: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
                let _ = writeln!(s, "{}", cells.join("  ").trim_end());
            }
        }
    }
    s
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_PARSE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
