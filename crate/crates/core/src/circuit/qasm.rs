//! OpenQASM 2.0 subset reader and writer.
//!
//! Supported: the `OPENQASM` header, `include "qelib1.inc"`, a single
//! `qreg`, gate statements over the supported alphabet (with any number of
//! leading `c`s for positive controls, e.g. `ccx`, `cp`, `cswap`), and angle
//! expressions over numbers and `pi` with `+ - * /` and parentheses.
//! `creg`, `measure` and `barrier` statements are parsed and ignored.

use std::fmt::Write as _;

use super::{Circuit, CircuitError, Gate, GateKind, GateTag};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    Str(String),
    Sym(char),
    Arrow,
}

fn perr(line: usize, message: impl Into<String>) -> CircuitError {
    CircuitError::Parse {
        line,
        message: message.into(),
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, CircuitError> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    let mut line = 1;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            '\n' => {
                line += 1;
                i += 1;
            }
            c if c.is_ascii_whitespace() => i += 1,
            '/' if bytes.get(i + 1) == Some(&b'/') => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            '/' if bytes.get(i + 1) == Some(&b'*') => {
                i += 2;
                while i < bytes.len() && !(bytes[i] == b'*' && bytes.get(i + 1) == Some(&b'/')) {
                    if bytes[i] == b'\n' {
                        line += 1;
                    }
                    i += 1;
                }
                if i >= bytes.len() {
                    return Err(perr(line, "unterminated block comment"));
                }
                i += 2;
            }
            '-' if bytes.get(i + 1) == Some(&b'>') => {
                out.push((Tok::Arrow, line));
                i += 2;
            }
            '"' => {
                let start = i + 1;
                i = start;
                while i < bytes.len() && bytes[i] != b'"' && bytes[i] != b'\n' {
                    i += 1;
                }
                if i >= bytes.len() || bytes[i] != b'"' {
                    return Err(perr(line, "unterminated string literal"));
                }
                out.push((Tok::Str(src[start..i].to_string()), line));
                i += 1;
            }
            c if c.is_ascii_digit() || (c == '.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[start..i];
                let value = text
                    .parse::<f64>()
                    .map_err(|_| perr(line, format!("malformed number '{text}'")))?;
                out.push((Tok::Num(value), line));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), line));
            }
            ';' | ',' | '(' | ')' | '[' | ']' | '{' | '}' | '+' | '-' | '*' | '/' => {
                out.push((Tok::Sym(c), line));
                i += 1;
            }
            other => return Err(perr(line, format!("unexpected character '{other}'"))),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    last_line: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn line(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(_, l)| *l)
            .unwrap_or(self.last_line)
    }

    fn next(&mut self) -> Result<Tok, CircuitError> {
        let line = self.line();
        let tok = self
            .toks
            .get(self.pos)
            .map(|(t, _)| t.clone())
            .ok_or_else(|| perr(line, "unexpected end of input"))?;
        self.pos += 1;
        Ok(tok)
    }

    fn expect_sym(&mut self, sym: char) -> Result<(), CircuitError> {
        let line = self.line();
        match self.next()? {
            Tok::Sym(c) if c == sym => Ok(()),
            other => Err(perr(line, format!("expected '{sym}', found {}", describe(&other)))),
        }
    }

    fn eat_sym(&mut self, sym: char) -> bool {
        if self.peek() == Some(&Tok::Sym(sym)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<String, CircuitError> {
        let line = self.line();
        match self.next()? {
            Tok::Ident(s) => Ok(s),
            other => Err(perr(line, format!("expected identifier, found {}", describe(&other)))),
        }
    }

    fn integer(&mut self) -> Result<usize, CircuitError> {
        let line = self.line();
        match self.next()? {
            Tok::Num(v) if v >= 0.0 && v.fract() == 0.0 && v < u32::MAX as f64 => Ok(v as usize),
            other => Err(perr(line, format!("expected integer, found {}", describe(&other)))),
        }
    }

    fn skip_statement(&mut self) -> Result<(), CircuitError> {
        loop {
            if self.next()? == Tok::Sym(';') {
                return Ok(());
            }
        }
    }

    // expr := term (('+' | '-') term)*
    fn expr(&mut self) -> Result<f64, CircuitError> {
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

    // term := factor (('*' | '/') factor)*
    fn term(&mut self) -> Result<f64, CircuitError> {
        let mut v = self.factor()?;
        loop {
            if self.eat_sym('*') {
                v *= self.factor()?;
            } else if self.eat_sym('/') {
                v /= self.factor()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn factor(&mut self) -> Result<f64, CircuitError> {
        let line = self.line();
        match self.next()? {
            Tok::Sym('-') => Ok(-self.factor()?),
            Tok::Sym('+') => self.factor(),
            Tok::Sym('(') => {
                let v = self.expr()?;
                self.expect_sym(')')?;
                Ok(v)
            }
            Tok::Num(v) => Ok(v),
            Tok::Ident(s) if s == "pi" => Ok(std::f64::consts::PI),
            other => Err(perr(line, format!("expected angle expression, found {}", describe(&other)))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Num(v) => format!("number {v}"),
        Tok::Str(s) => format!("string \"{s}\""),
        Tok::Sym(c) => format!("'{c}'"),
        Tok::Arrow => "'->'".to_string(),
    }
}

fn base_tag(name: &str) -> Option<GateTag> {
    Some(match name {
        "x" => GateTag::X,
        "y" => GateTag::Y,
        "z" => GateTag::Z,
        "h" => GateTag::H,
        "s" => GateTag::S,
        "sdg" => GateTag::Sdg,
        "t" => GateTag::T,
        "tdg" => GateTag::Tdg,
        "sx" => GateTag::SX,
        "sxdg" => GateTag::SXdg,
        "p" | "u1" | "phase" => GateTag::P,
        "ry" => GateTag::RY,
        "rz" => GateTag::RZ,
        "u" | "u3" | "U" => GateTag::U,
        "swap" => GateTag::Swap,
        _ => return None,
    })
}

/// Splits a gate name into (base tag, control count): `ccx` → (X, 2).
fn resolve_name(name: &str) -> Option<(GateTag, usize)> {
    let mut rest = name;
    let mut controls = 0;
    loop {
        if let Some(tag) = base_tag(rest) {
            return Some((tag, controls));
        }
        rest = rest.strip_prefix('c')?;
        controls += 1;
    }
}

fn param_count(tag: GateTag) -> usize {
    match tag {
        GateTag::P | GateTag::RY | GateTag::RZ => 1,
        GateTag::U => 3,
        _ => 0,
    }
}

fn kind_from(tag: GateTag, p: &[f64]) -> GateKind {
    match tag {
        GateTag::X => GateKind::X,
        GateTag::Y => GateKind::Y,
        GateTag::Z => GateKind::Z,
        GateTag::H => GateKind::H,
        GateTag::S => GateKind::S,
        GateTag::Sdg => GateKind::Sdg,
        GateTag::T => GateKind::T,
        GateTag::Tdg => GateKind::Tdg,
        GateTag::SX => GateKind::SX,
        GateTag::SXdg => GateKind::SXdg,
        GateTag::P => GateKind::P(p[0]),
        GateTag::RY => GateKind::RY(p[0]),
        GateTag::RZ => GateKind::RZ(p[0]),
        GateTag::U => GateKind::U(p[0], p[1], p[2]),
        GateTag::Swap => GateKind::Swap,
    }
}

/// Parses an OpenQASM 2.0 subset program into a [`Circuit`].
///
/// Errors carry the 1-based line number of the offending token.
pub fn parse_qasm(src: &str) -> Result<Circuit, CircuitError> {
    let toks = lex(src)?;
    let last_line = toks.last().map(|(_, l)| *l).unwrap_or(1);
    let mut p = Parser {
        toks,
        pos: 0,
        last_line,
    };

    let line = p.line();
    match p.next() {
        Ok(Tok::Ident(s)) if s == "OPENQASM" => {}
        _ => return Err(perr(line, "expected 'OPENQASM 2.0;' header")),
    }
    let line = p.line();
    match p.next()? {
        Tok::Num(v) if (2.0..3.0).contains(&v) => {}
        other => return Err(perr(line, format!("unsupported OpenQASM version {}", describe(&other)))),
    }
    p.expect_sym(';')?;

    let mut reg: Option<(String, usize)> = None;
    let mut circuit: Option<Circuit> = None;

    while p.peek().is_some() {
        let line = p.line();
        let word = p.ident()?;
        match word.as_str() {
            "include" => {
                let line = p.line();
                match p.next()? {
                    Tok::Str(s) if s == "qelib1.inc" => {}
                    Tok::Str(s) => return Err(perr(line, format!("unsupported include \"{s}\""))),
                    other => return Err(perr(line, format!("expected file name, found {}", describe(&other)))),
                }
                p.expect_sym(';')?;
            }
            "qreg" => {
                let name = p.ident()?;
                p.expect_sym('[')?;
                let size = p.integer()?;
                p.expect_sym(']')?;
                p.expect_sym(';')?;
                if reg.is_some() {
                    return Err(perr(line, "only a single qreg is supported"));
                }
                if size == 0 {
                    return Err(perr(line, "qreg size must be positive"));
                }
                circuit = Some(Circuit::new(size));
                reg = Some((name, size));
            }
            "creg" | "barrier" | "measure" => p.skip_statement()?,
            "gate" | "opaque" => {
                return Err(perr(line, "custom gate definitions are not supported"));
            }
            "if" | "reset" => {
                return Err(perr(line, format!("'{word}' statements are not supported")));
            }
            name => {
                let Some((tag, controls)) = resolve_name(name) else {
                    return Err(perr(line, format!("unknown gate '{name}'")));
                };
                let mut params = Vec::new();
                if p.eat_sym('(') && !p.eat_sym(')') {
                    loop {
                        params.push(p.expr()?);
                        if p.eat_sym(')') {
                            break;
                        }
                        p.expect_sym(',')?;
                    }
                }
                if params.len() != param_count(tag) {
                    return Err(perr(
                        line,
                        format!(
                            "gate '{name}' takes {} parameter(s), got {}",
                            param_count(tag),
                            params.len()
                        ),
                    ));
                }
                let Some((reg_name, size)) = reg.as_ref() else {
                    return Err(perr(line, "gate used before qreg declaration"));
                };
                let mut qubits = Vec::new();
                loop {
                    let arg_line = p.line();
                    let r = p.ident()?;
                    if &r != reg_name {
                        return Err(perr(arg_line, format!("unknown register '{r}'")));
                    }
                    p.expect_sym('[')?;
                    let idx = p.integer()?;
                    p.expect_sym(']')?;
                    if idx >= *size {
                        return Err(perr(
                            arg_line,
                            format!("qubit index {idx} out of range for register '{r}' of size {size}"),
                        ));
                    }
                    qubits.push(idx);
                    if p.eat_sym(';') {
                        break;
                    }
                    p.expect_sym(',')?;
                }
                let kind = kind_from(tag, &params);
                let expected = controls + kind.target_count();
                if qubits.len() != expected {
                    return Err(perr(
                        line,
                        format!("gate '{name}' expects {expected} qubit(s), got {}", qubits.len()),
                    ));
                }
                let targets = qubits.split_off(controls);
                let gate = Gate::controlled(kind, qubits, targets);
                circuit
                    .as_mut()
                    .expect("qreg seen")
                    .push(gate)
                    .map_err(|e| perr(line, e.to_string()))?;
            }
        }
    }

    circuit.ok_or_else(|| perr(last_line, "missing qreg declaration"))
}

/// Renders a circuit as OpenQASM 2.0 over a register named `q`.
///
/// Angles are written with round-trip precision, so parsing the output
/// yields a gate-identical circuit.
pub fn emit_qasm(c: &Circuit) -> String {
    let mut out = String::new();
    out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let _ = writeln!(out, "qreg q[{}];", c.qubits());
    for g in c.gates() {
        let _ = writeln!(out, "{g};");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{qft, random_circuit};
    use proptest::prelude::*;

    const QFT3: &str = r#"OPENQASM 2.0;
include "qelib1.inc";
qreg q[3];
creg c[3];
h q[0];
cp(pi/2) q[1],q[0];
cp(pi/4) q[2],q[0];
h q[1];
cp(pi/2) q[2],q[1];
h q[2];
swap q[0],q[2];
barrier q;
measure q -> c;
"#;

    #[test]
    fn parses_qft3() {
        let c = parse_qasm(QFT3).unwrap();
        assert_eq!(c, qft(3).unwrap());
    }

    #[test]
    fn header_and_qreg_only() {
        let c = parse_qasm("OPENQASM 2.0;\nqreg q[4];\n").unwrap();
        assert_eq!(c.qubits(), 4);
        assert!(c.is_empty());
    }

    #[test]
    fn unknown_gate_is_named_with_line() {
        let err = parse_qasm("OPENQASM 2.0;\nqreg q[2];\nfoo q[0];\n").unwrap_err();
        assert_eq!(
            err,
            CircuitError::Parse {
                line: 3,
                message: "unknown gate 'foo'".into()
            }
        );
    }

    #[test]
    fn malformed_inputs_report_lines() {
        let cases = [
            ("qreg q[2];", 1),
            ("OPENQASM 2.0;\nqreg q[2];\nh q[2];", 3),
            ("OPENQASM 2.0;\nqreg q[2];\n\ncx q[0] q[1];", 4),
            ("OPENQASM 2.0;\nqreg q[2];\nrz q[0];", 3),
            ("OPENQASM 2.0;\nqreg q[2];\nrz(pi/) q[0];", 3),
            ("OPENQASM 2.0;\nqreg q[2];\ncx q[0],q[0];", 3),
            ("OPENQASM 2.0;\nh q[0];", 2),
            ("OPENQASM 2.0;\nqreg q[2];\nqreg r[2];", 3),
            ("OPENQASM 2.0;\nqreg q[2];\nh r[0];", 3),
            ("OPENQASM 2.0;\nqreg q[2];\nh q[0]", 3),
            ("OPENQASM 2.0;\ninclude \"other.inc\";", 2),
            ("OPENQASM 2.0;\nqreg q[1];\ngate foo a { h a; }", 3),
        ];
        for (src, line) in cases {
            match parse_qasm(src) {
                Err(CircuitError::Parse { line: l, .. }) => assert_eq!(l, line, "{src}"),
                other => panic!("expected parse error for {src:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn angle_expressions() {
        let c = parse_qasm("OPENQASM 2.0;\nqreg q[1];\nrz(-(pi + 1)*2/4) q[0];\np(1e-3) q[0];\n")
            .unwrap();
        assert_eq!(c.gates()[0].kind, GateKind::RZ(-(std::f64::consts::PI + 1.0) * 2.0 / 4.0));
        assert_eq!(c.gates()[1].kind, GateKind::P(1e-3));
    }

    #[test]
    fn multi_controlled_names() {
        let c = parse_qasm("OPENQASM 2.0;\nqreg q[3];\nccx q[0],q[1],q[2];\ncswap q[0],q[1],q[2];\ncu1(0.5) q[0],q[1];\n")
            .unwrap();
        assert_eq!(c.gates()[0], Gate::controlled(GateKind::X, vec![0, 1], vec![2]));
        assert_eq!(c.gates()[1], Gate::controlled(GateKind::Swap, vec![0], vec![1, 2]));
        assert_eq!(c.gates()[2], Gate::cp(0.5, 0, 1));
    }

    proptest! {
        #[test]
        fn emit_then_parse_is_gate_identical(n in 1usize..6, len in 0usize..40, seed in any::<u64>()) {
            let c = random_circuit(n, len, seed);
            let back = parse_qasm(&emit_qasm(&c)).unwrap();
            prop_assert_eq!(back, c);
        }
    }
}
