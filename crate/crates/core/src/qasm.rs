//! OpenQASM 2.0 subset reader and writer.
//!
//! Accepted: the `OPENQASM 2.0;` header, `include` lines, one `qreg`, at
//! most one `creg`, gate applications (with register broadcasting),
//! `barrier` and `measure`. Angles are constant expressions over numbers
//! and `pi`. Gate definitions, `opaque` declarations, `reset` and `if` are
//! rejected. Unknown one- and two-qubit gates are kept as opaque gates.

use std::fmt::Write as _;

use thiserror::Error;

use crate::circuit::{CircuitError, QCircuit};
use crate::gate::{Gate, GateKind};

pub const HEADER: &str = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";

#[derive(Debug, Error, PartialEq)]
pub enum QasmError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: gate `{name}` acts on {arity} qubits; only 1- and 2-qubit gates are supported")]
    UnsupportedArity {
        line: usize,
        col: usize,
        name: String,
        arity: usize,
    },
    #[error("{line}:{col}: undeclared register `{name}`")]
    UndeclaredRegister { line: usize, col: usize, name: String },
    #[error("{line}:{col}: {msg}")]
    Unsupported { line: usize, col: usize, msg: String },
    #[error("no quantum register declared")]
    NoRegister,
    #[error("invalid circuit: {0}")]
    Invalid(#[from] CircuitError),
    #[error("gate {0} is opaque but has no label")]
    UnlabeledOpaque(usize),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    Str(String),
    Sym(char),
    Arrow,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn tokenize(src: &str) -> Result<Vec<Token>, QasmError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let mut advance = |n: usize, i: &mut usize| {
            for _ in 0..n {
                if chars[*i] == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                *i += 1;
            }
        };
        if c.is_whitespace() {
            advance(1, &mut i);
        } else if c == '/' && chars.get(i + 1) == Some(&'/') {
            let mut n = 0;
            while i + n < chars.len() && chars[i + n] != '\n' {
                n += 1;
            }
            advance(n, &mut i);
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut n = 0;
            while i + n < chars.len() && (chars[i + n].is_ascii_alphanumeric() || chars[i + n] == '_') {
                n += 1;
            }
            let s: String = chars[i..i + n].iter().collect();
            out.push(Token { tok: Tok::Ident(s), line: tl, col: tc });
            advance(n, &mut i);
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let mut n = 0;
            while i + n < chars.len() && (chars[i + n].is_ascii_digit() || chars[i + n] == '.') {
                n += 1;
            }
            if i + n < chars.len() && (chars[i + n] == 'e' || chars[i + n] == 'E') {
                let mut k = n + 1;
                if i + k < chars.len() && (chars[i + k] == '+' || chars[i + k] == '-') {
                    k += 1;
                }
                if i + k < chars.len() && chars[i + k].is_ascii_digit() {
                    while i + k < chars.len() && chars[i + k].is_ascii_digit() {
                        k += 1;
                    }
                    n = k;
                }
            }
            let s: String = chars[i..i + n].iter().collect();
            let v = s.parse::<f64>().map_err(|_| QasmError::Syntax {
                line: tl,
                col: tc,
                msg: format!("bad number `{s}`"),
            })?;
            out.push(Token { tok: Tok::Num(v), line: tl, col: tc });
            advance(n, &mut i);
        } else if c == '"' {
            let mut n = 1;
            while i + n < chars.len() && chars[i + n] != '"' {
                n += 1;
            }
            if i + n >= chars.len() {
                return Err(QasmError::Syntax { line: tl, col: tc, msg: "unterminated string".into() });
            }
            let s: String = chars[i + 1..i + n].iter().collect();
            out.push(Token { tok: Tok::Str(s), line: tl, col: tc });
            advance(n + 1, &mut i);
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push(Token { tok: Tok::Arrow, line: tl, col: tc });
            advance(2, &mut i);
        } else if "[](),;+-*/^{}".contains(c) {
            out.push(Token { tok: Tok::Sym(c), line: tl, col: tc });
            advance(1, &mut i);
        } else {
            return Err(QasmError::Syntax { line: tl, col: tc, msg: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

/// A register reference: whole register or one indexed element.
struct Arg {
    index: Option<usize>,
    line: usize,
    col: usize,
}

struct Register {
    name: String,
    size: usize,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    qreg: Option<Register>,
    creg: Option<Register>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        match self.toks.get(self.pos).or(self.toks.last()) {
            Some(t) => (t.line, t.col),
            None => (1, 1),
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, QasmError> {
        let (line, col) = self.here();
        Err(QasmError::Syntax { line, col, msg: msg.into() })
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn expect_sym(&mut self, c: char) -> Result<(), QasmError> {
        match self.peek() {
            Some(Tok::Sym(s)) if *s == c => {
                self.pos += 1;
                Ok(())
            }
            other => {
                let found = describe(other);
                self.err(format!("expected `{c}`, found {found}"))
            }
        }
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(s)) if *s == c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<String, QasmError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            other => {
                let found = describe(other);
                self.err(format!("expected identifier, found {found}"))
            }
        }
    }

    fn uint(&mut self) -> Result<usize, QasmError> {
        match self.peek() {
            Some(Tok::Num(v)) if v.fract() == 0.0 && *v >= 0.0 => {
                let v = *v as usize;
                self.pos += 1;
                Ok(v)
            }
            other => {
                let found = describe(other);
                self.err(format!("expected non-negative integer, found {found}"))
            }
        }
    }

    // expr := term (('+'|'-') term)*
    fn expr(&mut self) -> Result<f64, QasmError> {
        let mut v = self.term()?;
        loop {
            if self.eat_sym('+') {
                v += self.term()?;
            } else if self.eat_sym('-') {
                v -= self.term()?;
            } else {
                return Ok(v);
            }
        }
    }

    // term := unary (('*'|'/') unary)*
    fn term(&mut self) -> Result<f64, QasmError> {
        let mut v = self.unary()?;
        loop {
            if self.eat_sym('*') {
                v *= self.unary()?;
            } else if self.eat_sym('/') {
                v /= self.unary()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn unary(&mut self) -> Result<f64, QasmError> {
        if self.eat_sym('-') {
            return Ok(-self.unary()?);
        }
        if self.eat_sym('+') {
            return self.unary();
        }
        let base = self.atom()?;
        if self.eat_sym('^') {
            let exp = self.unary()?;
            return Ok(base.powf(exp));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<f64, QasmError> {
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(v)
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect_sym(')')?;
                Ok(v)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if name == "pi" {
                    return Ok(std::f64::consts::PI);
                }
                let f: fn(f64) -> f64 = match name.as_str() {
                    "sin" => f64::sin,
                    "cos" => f64::cos,
                    "tan" => f64::tan,
                    "exp" => f64::exp,
                    "ln" => f64::ln,
                    "sqrt" => f64::sqrt,
                    _ => {
                        self.pos -= 1;
                        return self.err(format!("unknown identifier `{name}` in expression"));
                    }
                };
                self.expect_sym('(')?;
                let v = self.expr()?;
                self.expect_sym(')')?;
                Ok(f(v))
            }
            other => {
                let found = describe(other.as_ref());
                self.err(format!("expected expression, found {found}"))
            }
        }
    }

    fn reg_decl(&mut self) -> Result<Register, QasmError> {
        let name = self.ident()?;
        self.expect_sym('[')?;
        let size = self.uint()?;
        self.expect_sym(']')?;
        self.expect_sym(';')?;
        Ok(Register { name, size })
    }

    fn qarg(&mut self) -> Result<Arg, QasmError> {
        let (line, col) = self.here();
        let name = self.ident()?;
        let reg = match &self.qreg {
            Some(r) if r.name == name => r.size,
            _ => return Err(QasmError::UndeclaredRegister { line, col, name }),
        };
        let index = if self.eat_sym('[') {
            let i = self.uint()?;
            self.expect_sym(']')?;
            if i >= reg {
                return Err(QasmError::Syntax {
                    line,
                    col,
                    msg: format!("index {i} out of range for `{name}[{reg}]`"),
                });
            }
            Some(i)
        } else {
            None
        };
        Ok(Arg { index, line, col })
    }

    fn carg(&mut self) -> Result<Arg, QasmError> {
        let (line, col) = self.here();
        let name = self.ident()?;
        let reg = match &self.creg {
            Some(r) if r.name == name => r.size,
            _ => return Err(QasmError::UndeclaredRegister { line, col, name }),
        };
        let index = if self.eat_sym('[') {
            let i = self.uint()?;
            self.expect_sym(']')?;
            if i >= reg {
                return Err(QasmError::Syntax {
                    line,
                    col,
                    msg: format!("index {i} out of range for `{name}[{reg}]`"),
                });
            }
            Some(i)
        } else {
            None
        };
        Ok(Arg { index, line, col })
    }

    fn qargs(&mut self) -> Result<Vec<Arg>, QasmError> {
        let mut args = vec![self.qarg()?];
        while self.eat_sym(',') {
            args.push(self.qarg()?);
        }
        self.expect_sym(';')?;
        Ok(args)
    }

    fn qsize(&self) -> usize {
        self.qreg.as_ref().map_or(0, |r| r.size)
    }

    /// Expands register broadcasting into per-qubit operand lists.
    fn broadcast(&self, args: &[Arg]) -> Result<Vec<Vec<usize>>, QasmError> {
        let width = self.qsize();
        let whole = args.iter().filter(|a| a.index.is_none()).count();
        if whole == 0 {
            return Ok(vec![args.iter().map(|a| a.index.unwrap()).collect()]);
        }
        Ok((0..width)
            .map(|k| args.iter().map(|a| a.index.unwrap_or(k)).collect())
            .collect())
    }
}

fn describe(t: Option<&Tok>) -> String {
    match t {
        None => "end of input".into(),
        Some(Tok::Ident(s)) => format!("`{s}`"),
        Some(Tok::Num(v)) => format!("`{v}`"),
        Some(Tok::Str(s)) => format!("\"{s}\""),
        Some(Tok::Sym(c)) => format!("`{c}`"),
        Some(Tok::Arrow) => "`->`".into(),
    }
}

/// Parses an OpenQASM 2.0 program into a circuit over its single quantum
/// register.
pub fn parse_qasm(src: &str) -> Result<QCircuit, QasmError> {
    let mut p = Parser {
        toks: tokenize(src)?,
        pos: 0,
        qreg: None,
        creg: None,
    };
    let mut gates = Vec::new();

    while let Some(tok) = p.peek().cloned() {
        let (line, col) = p.here();
        let word = match tok {
            Tok::Ident(w) => w,
            other => return p.err(format!("expected statement, found {}", describe(Some(&other)))),
        };
        p.pos += 1;
        match word.as_str() {
            "OPENQASM" => {
                match p.next() {
                    Some(Tok::Num(2.0)) => {}
                    _ => {
                        p.pos -= 1;
                        return p.err("only OPENQASM 2.0 is supported");
                    }
                }
                p.expect_sym(';')?;
            }
            "include" => {
                match p.next() {
                    Some(Tok::Str(_)) => {}
                    _ => {
                        p.pos -= 1;
                        return p.err("expected file name after include");
                    }
                }
                p.expect_sym(';')?;
            }
            "qreg" => {
                if p.qreg.is_some() {
                    return Err(QasmError::Unsupported {
                        line,
                        col,
                        msg: "multiple quantum registers are not supported".into(),
                    });
                }
                p.qreg = Some(p.reg_decl()?);
            }
            "creg" => {
                if p.creg.is_some() {
                    return Err(QasmError::Unsupported {
                        line,
                        col,
                        msg: "multiple classical registers are not supported".into(),
                    });
                }
                p.creg = Some(p.reg_decl()?);
            }
            "gate" | "opaque" | "if" | "reset" => {
                return Err(QasmError::Unsupported {
                    line,
                    col,
                    msg: format!("`{word}` statements are not supported"),
                });
            }
            "barrier" => {
                let args = p.qargs()?;
                let mut qs: Vec<usize> = Vec::new();
                for a in &args {
                    match a.index {
                        Some(i) => qs.push(i),
                        None => qs.extend(0..p.qsize()),
                    }
                }
                let mut seen = Vec::new();
                qs.retain(|q| {
                    let fresh = !seen.contains(q);
                    seen.push(*q);
                    fresh
                });
                gates.push(Gate::barrier(qs));
            }
            "measure" => {
                let q = p.qarg()?;
                match p.next() {
                    Some(Tok::Arrow) => {}
                    _ => {
                        p.pos -= 1;
                        return p.err("expected `->` in measure");
                    }
                }
                let c = p.carg()?;
                p.expect_sym(';')?;
                match (q.index, c.index) {
                    (Some(qi), Some(ci)) => gates.push(Gate::measure(qi, ci)),
                    (None, None) => {
                        let n = p.qsize().min(p.creg.as_ref().map_or(0, |r| r.size));
                        gates.extend((0..n).map(|k| Gate::measure(k, k)));
                    }
                    _ => {
                        return Err(QasmError::Syntax {
                            line: c.line,
                            col: c.col,
                            msg: "measure mixes a register with an indexed bit".into(),
                        })
                    }
                }
            }
            _ => {
                let mut params = Vec::new();
                if p.eat_sym('(') && !p.eat_sym(')') {
                    params.push(p.expr()?);
                    while p.eat_sym(',') {
                        params.push(p.expr()?);
                    }
                    p.expect_sym(')')?;
                }
                let args = p.qargs()?;
                if args.len() > 2 {
                    return Err(QasmError::UnsupportedArity { line, col, name: word, arity: args.len() });
                }
                let kind = GateKind::from_qasm_name(&word);
                for qs in p.broadcast(&args)? {
                    if qs.len() == 2 && qs[0] == qs[1] {
                        let a = &args[1];
                        return Err(QasmError::Syntax {
                            line: a.line,
                            col: a.col,
                            msg: format!("gate `{word}` uses qubit {} twice", qs[0]),
                        });
                    }
                    let g = match kind {
                        Some(k) => {
                            if k.qubit_arity() != Some(qs.len()) {
                                return Err(QasmError::Syntax {
                                    line,
                                    col,
                                    msg: format!("gate `{word}` expects {} qubit(s)", k.qubit_arity().unwrap_or(0)),
                                });
                            }
                            if k.param_arity() != Some(params.len()) {
                                return Err(QasmError::Syntax {
                                    line,
                                    col,
                                    msg: format!("gate `{word}` expects {} parameter(s)", k.param_arity().unwrap_or(0)),
                                });
                            }
                            Gate::new(k, qs, params.clone())
                        }
                        None => Gate::opaque(&word, qs, params.clone()),
                    };
                    gates.push(g);
                }
            }
        }
    }

    let qreg = p.qreg.ok_or(QasmError::NoRegister)?;
    let c = QCircuit {
        name: qreg.name.clone(),
        num_qubits: qreg.size,
        num_clbits: p.creg.map_or(0, |r| r.size),
        gates,
    };
    c.validate()?;
    Ok(c)
}

/// Writes a circuit as OpenQASM 2.0 with a `q` register (and a `c`
/// register when it measures).
pub fn emit_qasm(c: &QCircuit) -> Result<String, QasmError> {
    let mut out = String::from(HEADER);
    writeln!(out, "qreg q[{}];", c.num_qubits).unwrap();
    if c.num_clbits > 0 {
        writeln!(out, "creg c[{}];", c.num_clbits).unwrap();
    }
    for (i, g) in c.gates.iter().enumerate() {
        if g.kind.is_opaque() && g.label.is_none() {
            return Err(QasmError::UnlabeledOpaque(i));
        }
        let qs: Vec<String> = g.qubits.iter().map(|q| format!("q[{q}]")).collect();
        match g.kind {
            GateKind::Measure => {
                writeln!(out, "measure {} -> c[{}];", qs[0], g.clbit.unwrap_or(0)).unwrap();
            }
            _ => {
                out.push_str(g.name());
                if !g.params.is_empty() {
                    // `{:?}` prints the shortest string that parses back to
                    // the same f64.
                    let ps: Vec<String> = g.params.iter().map(|v| format!("{v:?}")).collect();
                    write!(out, "({})", ps.join(",")).unwrap();
                }
                writeln!(out, " {};", qs.join(",")).unwrap();
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_bell_pair() {
        let c = parse_qasm("qreg q[2]; h q[0]; cx q[0],q[1];").unwrap();
        assert_eq!(c.num_qubits, 2);
        assert_eq!(c.gates, vec![Gate::h(0), Gate::cx(0, 1)]);
    }

    #[test]
    fn parses_rotation() {
        let c = parse_qasm("qreg q[1]; ry(0.5) q[0];").unwrap();
        assert_eq!(c.gates, vec![Gate::ry(0.5, 0)]);
    }

    #[test]
    fn rejects_three_qubit_gate() {
        let e = parse_qasm("qreg q[3]; ccx q[0],q[1],q[2];").unwrap_err();
        match e {
            QasmError::UnsupportedArity { name, arity, .. } => {
                assert_eq!(name, "ccx");
                assert_eq!(arity, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_undeclared_register() {
        let e = parse_qasm("qreg q[2]; h r[0];").unwrap_err();
        assert!(matches!(e, QasmError::UndeclaredRegister { ref name, .. } if name == "r"));
    }

    #[test]
    fn syntax_error_reports_position() {
        let e = parse_qasm("qreg q[2];\nh q[0]\ncx q[0],q[1];").unwrap_err();
        match e {
            QasmError::Syntax { line, col, .. } => assert_eq!((line, col), (3, 1)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_second_qreg_and_gate_definitions() {
        assert!(matches!(
            parse_qasm("qreg a[1]; qreg b[1];"),
            Err(QasmError::Unsupported { .. })
        ));
        assert!(matches!(
            parse_qasm("qreg q[1]; gate foo a { h a; }"),
            Err(QasmError::Unsupported { .. })
        ));
    }

    #[test]
    fn angle_expressions() {
        let c = parse_qasm("qreg q[1]; u3(pi/2, -pi/4, 2*pi - 0.5) q[0]; rz(-(pi)) q[0];").unwrap();
        let pi = std::f64::consts::PI;
        assert_eq!(c.gates[0].params, vec![pi / 2.0, -pi / 4.0, 2.0 * pi - 0.5]);
        assert_eq!(c.gates[1].params, vec![-pi]);
    }

    #[test]
    fn broadcasting_and_opaque_gates() {
        let src = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[3];\ncreg c[3];\nh q;\ncz q[0],q[2];\nbarrier q;\nmeasure q -> c;\n";
        let c = parse_qasm(src).unwrap();
        assert_eq!(c.gates.len(), 3 + 1 + 1 + 3);
        assert_eq!(c.gates[3].kind, GateKind::Opaque2q);
        assert_eq!(c.gates[3].label.as_deref(), Some("cz"));
        assert_eq!(c.gates[4].qubits, vec![0, 1, 2]);
        assert_eq!(c.gates[7], Gate::measure(2, 2));
    }

    #[test]
    fn emit_empty_circuit() {
        let s = emit_qasm(&QCircuit::new("e", 1)).unwrap();
        assert_eq!(s, format!("{HEADER}qreg q[1];\n"));
    }

    #[test]
    fn emit_reversed_cx() {
        let s = emit_qasm(&QCircuit::with_gates("e", 2, vec![Gate::cx(1, 0)])).unwrap();
        assert!(s.ends_with("cx q[1],q[0];\n"));
    }

    #[test]
    fn emit_rejects_unlabeled_opaque() {
        let g = Gate::new(GateKind::Opaque1q, vec![0], vec![]);
        let c = QCircuit::with_gates("e", 1, vec![g]);
        assert_eq!(emit_qasm(&c), Err(QasmError::UnlabeledOpaque(0)));
    }

    #[test]
    fn round_trip_keeps_parameters_exact() {
        let mut c = QCircuit::new("q", 2);
        c.num_clbits = 1;
        c.push(Gate::ry(0.1 + 0.2, 0));
        c.push(Gate::new(GateKind::U3, vec![1], vec![1e-17, -3.5, 6.283185307179587]));
        c.push(Gate::opaque("cu1", vec![0, 1], vec![0.25]));
        c.push(Gate::barrier(vec![0, 1]));
        c.push(Gate::measure(1, 0));
        let back = parse_qasm(&emit_qasm(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }
}
