// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! OpenQASM 2.0 reader and writer for the gate set the router understands.
//!
//! The reader accepts a single quantum register, any number of classical
//! registers, one-qubit gates, `cx`, `swap`, `measure`, `barrier` and
//! `reset`. User `gate` definitions are expanded inline, and the two-qubit
//! composites from `qelib1.inc` (`cz`, `cy`, `ch`, `crz`, `cu1`, `cu3`,
//! `rzz`) are expanded into CNOTs and one-qubit gates. Gates on three or
//! more qubits are rejected.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::circuit::{Circuit, Gate, GateKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QasmError {
    #[error("{line}:{col}: syntax error: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("{line}:{col}: unsupported gate `{name}` on {arity} qubits")]
    UnsupportedMultiQubitGate {
        line: usize,
        col: usize,
        name: String,
        arity: usize,
    },
    #[error("{line}:{col}: unsupported two-qubit gate `{name}`")]
    UnsupportedTwoQubitGate { line: usize, col: usize, name: String },
    #[error("{line}:{col}: only one quantum register is supported (found `{name}`)")]
    MultipleQuantumRegisters { line: usize, col: usize, name: String },
    #[error("{line}:{col}: {register}[{index}] out of range (size {size})")]
    OperandOutOfRange {
        line: usize,
        col: usize,
        register: String,
        index: usize,
        size: usize,
    },
    #[error("{line}:{col}: duplicate operands in `{name}`")]
    DuplicateOperands { line: usize, col: usize, name: String },
    #[error("{line}:{col}: {message}")]
    Semantic { line: usize, col: usize, message: String },
}

const QELIB_COMPOSITES: &str = r#"
gate cz a,b { h b; cx a,b; h b; }
gate cy a,b { sdg b; cx a,b; s b; }
gate ch a,b { h b; sdg b; cx a,b; h b; t b; cx a,b; t b; h b; s b; x b; s a; }
gate crz(lambda) a,b { u1(lambda/2) b; cx a,b; u1(-lambda/2) b; cx a,b; }
gate cu1(lambda) a,b { u1(lambda/2) a; cx a,b; u1(lambda/2) b; cx a,b; u1(-lambda/2) b; }
gate cu3(theta,phi,lambda) c,t { u1((lambda-phi)/2) t; cx c,t; u3(-theta/2,0,-(phi+lambda)/2) t; cx c,t; u3(theta/2,phi,0) t; }
gate rzz(theta) a,b { cx a,b; u1(theta) b; cx a,b; }
"#;

/// Gate names handled natively; definitions with these names are ignored.
const NATIVE: &[&str] = &[
    "h", "x", "y", "z", "s", "sdg", "t", "tdg", "rx", "ry", "rz", "u1", "u2", "u3", "U", "cx", "CX", "swap", "id",
    "u0", "sx", "sxdg", "reset", "p",
];

#[derive(Clone, Copy, Debug, PartialEq)]
struct Pos {
    line: usize,
    col: usize,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    Int(usize),
    Str(String),
    Sym(&'static str),
    Eof,
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, QasmError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, col, message: String| QasmError::Syntax { line, col, message };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let mut real = false;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                real = true;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    real = true;
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s: String = chars[start..i].iter().collect();
            let tok = if real {
                Tok::Num(s.parse().map_err(|_| err(line, col, format!("bad number `{s}`")))?)
            } else {
                match s.parse::<usize>() {
                    Ok(n) => Tok::Int(n),
                    Err(_) => Tok::Num(s.parse().map_err(|_| err(line, col, format!("bad number `{s}`")))?),
                }
            };
            out.push((tok, pos));
        } else if c == '"' {
            i += 1;
            while i < chars.len() && chars[i] != '"' && chars[i] != '\n' {
                i += 1;
            }
            if i >= chars.len() || chars[i] != '"' {
                return Err(err(line, col, "unterminated string".into()));
            }
            out.push((Tok::Str(chars[start + 1..i].iter().collect()), pos));
            i += 1;
        } else {
            let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
            let sym = match two.as_str() {
                "->" => Some("->"),
                "==" => Some("=="),
                _ => None,
            };
            if let Some(sym) = sym {
                out.push((Tok::Sym(sym), pos));
                i += 2;
            } else {
                let sym = match c {
                    ';' => ";",
                    ',' => ",",
                    '[' => "[",
                    ']' => "]",
                    '(' => "(",
                    ')' => ")",
                    '{' => "{",
                    '}' => "}",
                    '+' => "+",
                    '-' => "-",
                    '*' => "*",
                    '/' => "/",
                    '^' => "^",
                    _ => return Err(err(line, col, format!("unexpected character `{c}`"))),
                };
                out.push((Tok::Sym(sym), pos));
                i += 1;
            }
        }
        col += i - start;
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

#[derive(Clone, Debug)]
enum Expr {
    Num(f64),
    Param(String),
    Neg(Box<Expr>),
    Bin(char, Box<Expr>, Box<Expr>),
    Call(String, Box<Expr>),
}

impl Expr {
    fn eval(&self, env: &HashMap<String, f64>, pos: Pos) -> Result<f64, QasmError> {
        Ok(match self {
            Expr::Num(v) => *v,
            Expr::Param(name) => *env.get(name).ok_or_else(|| QasmError::Semantic {
                line: pos.line,
                col: pos.col,
                message: format!("unknown parameter `{name}`"),
            })?,
            Expr::Neg(e) => -e.eval(env, pos)?,
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(env, pos)?, b.eval(env, pos)?);
                match op {
                    '+' => a + b,
                    '-' => a - b,
                    '*' => a * b,
                    '/' => a / b,
                    _ => a.powf(b),
                }
            }
            Expr::Call(f, e) => {
                let v = e.eval(env, pos)?;
                match f.as_str() {
                    "sin" => v.sin(),
                    "cos" => v.cos(),
                    "tan" => v.tan(),
                    "exp" => v.exp(),
                    "ln" => v.ln(),
                    _ => v.sqrt(),
                }
            }
        })
    }
}

#[derive(Clone, Debug)]
struct BodyCall {
    name: String,
    params: Vec<Expr>,
    args: Vec<String>,
    pos: Pos,
}

#[derive(Clone, Debug)]
struct GateDef {
    params: Vec<String>,
    qargs: Vec<String>,
    /// `None` for opaque declarations.
    body: Option<Vec<BodyCall>>,
}

/// An operand as written: a whole register or one element of it.
enum Arg {
    Whole(String, Pos),
    Indexed(String, usize, Pos),
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    qreg: Option<(String, usize)>,
    circuit: Option<Circuit>,
    cregs: Vec<(String, usize)>,
    defs: HashMap<String, GateDef>,
}

impl Parser {
    fn new(text: &str) -> Result<Self, QasmError> {
        Ok(Parser {
            toks: lex(text)?,
            at: 0,
            qreg: None,
            circuit: None,
            cregs: Vec::new(),
            defs: HashMap::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, QasmError> {
        let pos = self.pos();
        Err(QasmError::Syntax {
            line: pos.line,
            col: pos.col,
            message: message.into(),
        })
    }

    fn eat(&mut self, sym: &str) -> bool {
        if matches!(self.peek(), Tok::Sym(s) if *s == sym) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, sym: &str) -> Result<(), QasmError> {
        if self.eat(sym) {
            Ok(())
        } else {
            self.syntax(format!("expected `{sym}`, found {}", describe(self.peek())))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), QasmError> {
        match self.bump() {
            (Tok::Ident(s), p) => Ok((s, p)),
            (t, p) => Err(QasmError::Syntax {
                line: p.line,
                col: p.col,
                message: format!("expected identifier, found {}", describe(&t)),
            }),
        }
    }

    fn int(&mut self) -> Result<usize, QasmError> {
        match self.bump() {
            (Tok::Int(n), _) => Ok(n),
            (t, p) => Err(QasmError::Syntax {
                line: p.line,
                col: p.col,
                message: format!("expected integer, found {}", describe(&t)),
            }),
        }
    }

    fn program(mut self) -> Result<Circuit, QasmError> {
        if matches!(self.peek(), Tok::Ident(s) if s == "OPENQASM") {
            self.bump();
            match self.bump() {
                (Tok::Num(2.0), _) | (Tok::Int(2), _) => {}
                (t, p) => {
                    return Err(QasmError::Syntax {
                        line: p.line,
                        col: p.col,
                        message: format!("unsupported OpenQASM version {}", describe(&t)),
                    })
                }
            }
            self.expect(";")?;
        }
        while *self.peek() != Tok::Eof {
            self.statement()?;
        }
        let mut circuit = match self.circuit.take() {
            Some(c) => c,
            None => Circuit::new(0),
        };
        for (name, size) in &self.cregs {
            circuit.add_creg(name, *size);
        }
        Ok(circuit)
    }

    fn statement(&mut self) -> Result<(), QasmError> {
        let (kw, pos) = match self.peek().clone() {
            Tok::Ident(s) => (s, self.pos()),
            t => return self.syntax(format!("expected statement, found {}", describe(&t))),
        };
        match kw.as_str() {
            "include" => {
                self.bump();
                let file = match self.bump() {
                    (Tok::Str(s), _) => s,
                    (t, p) => {
                        return Err(QasmError::Syntax {
                            line: p.line,
                            col: p.col,
                            message: format!("expected file name, found {}", describe(&t)),
                        })
                    }
                };
                self.expect(";")?;
                if file != "qelib1.inc" {
                    return Err(QasmError::Semantic {
                        line: pos.line,
                        col: pos.col,
                        message: format!("cannot include `{file}`"),
                    });
                }
                let mut lib = Parser::new(QELIB_COMPOSITES)?;
                while *lib.peek() != Tok::Eof {
                    lib.statement()?;
                }
                self.defs.extend(lib.defs);
            }
            "qreg" | "creg" => {
                self.bump();
                let (name, npos) = self.ident()?;
                self.expect("[")?;
                let size = self.int()?;
                self.expect("]")?;
                self.expect(";")?;
                if kw == "creg" {
                    self.cregs.push((name, size));
                } else {
                    if self.qreg.is_some() {
                        return Err(QasmError::MultipleQuantumRegisters {
                            line: npos.line,
                            col: npos.col,
                            name,
                        });
                    }
                    self.circuit = Some(Circuit::with_register(&name, size));
                    self.qreg = Some((name, size));
                }
            }
            "gate" | "opaque" => self.gate_def(kw == "opaque")?,
            "measure" => {
                self.bump();
                let src = self.arg()?;
                self.expect("->")?;
                let dst = self.arg()?;
                self.expect(";")?;
                let qubits = self.resolve_q(&src)?;
                let bits = self.resolve_c(&dst)?;
                if qubits.len() != bits.1.len() {
                    return Err(QasmError::Semantic {
                        line: pos.line,
                        col: pos.col,
                        message: "measure register sizes differ".into(),
                    });
                }
                for (q, b) in qubits.into_iter().zip(bits.1) {
                    let kind = GateKind::Measure {
                        creg: bits.0.clone(),
                        bit: b,
                    };
                    self.emit(Gate::new(kind, vec![q], Vec::new()), pos)?;
                }
            }
            "barrier" => {
                self.bump();
                let args = self.arg_list()?;
                self.expect(";")?;
                let mut qubits = Vec::new();
                for a in &args {
                    for q in self.resolve_q(a)? {
                        if !qubits.contains(&q) {
                            qubits.push(q);
                        }
                    }
                }
                self.emit(Gate::new(GateKind::Barrier, qubits, Vec::new()), pos)?;
            }
            "if" => {
                return Err(QasmError::Semantic {
                    line: pos.line,
                    col: pos.col,
                    message: "classical control is not supported".into(),
                })
            }
            _ => self.gate_call()?,
        }
        Ok(())
    }

    fn gate_def(&mut self, opaque: bool) -> Result<(), QasmError> {
        self.bump();
        let (name, _) = self.ident()?;
        let mut params = Vec::new();
        if self.eat("(") && !self.eat(")") {
            loop {
                params.push(self.ident()?.0);
                if self.eat(")") {
                    break;
                }
                self.expect(",")?;
            }
        }
        let mut qargs = vec![self.ident()?.0];
        while self.eat(",") {
            qargs.push(self.ident()?.0);
        }
        let body = if opaque {
            self.expect(";")?;
            None
        } else {
            self.expect("{")?;
            let mut body = Vec::new();
            while !self.eat("}") {
                let (callee, pos) = self.ident()?;
                if callee == "barrier" {
                    while !self.eat(";") {
                        if *self.peek() == Tok::Eof {
                            return self.syntax("unterminated gate body");
                        }
                        self.bump();
                    }
                    continue;
                }
                let exprs = self.param_list()?;
                let mut args = vec![self.ident()?.0];
                while self.eat(",") {
                    args.push(self.ident()?.0);
                }
                self.expect(";")?;
                body.push(BodyCall {
                    name: callee,
                    params: exprs,
                    args,
                    pos,
                });
            }
            Some(body)
        };
        if !NATIVE.contains(&name.as_str()) {
            self.defs.insert(name, GateDef { params, qargs, body });
        }
        Ok(())
    }

    fn param_list(&mut self) -> Result<Vec<Expr>, QasmError> {
        let mut exprs = Vec::new();
        if self.eat("(") && !self.eat(")") {
            loop {
                exprs.push(self.expr()?);
                if self.eat(")") {
                    break;
                }
                self.expect(",")?;
            }
        }
        Ok(exprs)
    }

    fn expr(&mut self) -> Result<Expr, QasmError> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat("+") {
                '+'
            } else if self.eat("-") {
                '-'
            } else {
                return Ok(lhs);
            };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> Result<Expr, QasmError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat("*") {
                '*'
            } else if self.eat("/") {
                '/'
            } else {
                return Ok(lhs);
            };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr, QasmError> {
        if self.eat("-") {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat("+") {
            return self.unary();
        }
        let base = self.atom()?;
        if self.eat("^") {
            return Ok(Expr::Bin('^', Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, QasmError> {
        match self.bump() {
            (Tok::Num(v), _) => Ok(Expr::Num(v)),
            (Tok::Int(n), _) => Ok(Expr::Num(n as f64)),
            (Tok::Sym("("), _) => {
                let e = self.expr()?;
                self.expect(")")?;
                Ok(e)
            }
            (Tok::Ident(name), _) if name == "pi" => Ok(Expr::Num(std::f64::consts::PI)),
            (Tok::Ident(name), _) if matches!(name.as_str(), "sin" | "cos" | "tan" | "exp" | "ln" | "sqrt") => {
                self.expect("(")?;
                let e = self.expr()?;
                self.expect(")")?;
                Ok(Expr::Call(name, Box::new(e)))
            }
            (Tok::Ident(name), _) => Ok(Expr::Param(name)),
            (t, p) => Err(QasmError::Syntax {
                line: p.line,
                col: p.col,
                message: format!("expected expression, found {}", describe(&t)),
            }),
        }
    }

    fn arg(&mut self) -> Result<Arg, QasmError> {
        let (name, pos) = self.ident()?;
        if self.eat("[") {
            let idx = self.int()?;
            self.expect("]")?;
            Ok(Arg::Indexed(name, idx, pos))
        } else {
            Ok(Arg::Whole(name, pos))
        }
    }

    fn arg_list(&mut self) -> Result<Vec<Arg>, QasmError> {
        let mut args = vec![self.arg()?];
        while self.eat(",") {
            args.push(self.arg()?);
        }
        Ok(args)
    }

    fn resolve_q(&self, arg: &Arg) -> Result<Vec<usize>, QasmError> {
        let (name, pos) = match arg {
            Arg::Whole(n, p) | Arg::Indexed(n, _, p) => (n, *p),
        };
        let (qname, size) = match &self.qreg {
            Some((qname, size)) if qname == name => (qname, *size),
            _ => {
                return Err(QasmError::Semantic {
                    line: pos.line,
                    col: pos.col,
                    message: format!("unknown quantum register `{name}`"),
                })
            }
        };
        match arg {
            Arg::Whole(..) => Ok((0..size).collect()),
            Arg::Indexed(_, idx, _) if *idx < size => Ok(vec![*idx]),
            Arg::Indexed(_, idx, _) => Err(QasmError::OperandOutOfRange {
                line: pos.line,
                col: pos.col,
                register: qname.clone(),
                index: *idx,
                size,
            }),
        }
    }

    fn resolve_c(&self, arg: &Arg) -> Result<(String, Vec<usize>), QasmError> {
        let (name, pos) = match arg {
            Arg::Whole(n, p) | Arg::Indexed(n, _, p) => (n, *p),
        };
        let size = self
            .cregs
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, s)| *s)
            .ok_or_else(|| QasmError::Semantic {
                line: pos.line,
                col: pos.col,
                message: format!("unknown classical register `{name}`"),
            })?;
        match arg {
            Arg::Whole(..) => Ok((name.clone(), (0..size).collect())),
            Arg::Indexed(_, idx, _) if *idx < size => Ok((name.clone(), vec![*idx])),
            Arg::Indexed(_, idx, _) => Err(QasmError::OperandOutOfRange {
                line: pos.line,
                col: pos.col,
                register: name.clone(),
                index: *idx,
                size,
            }),
        }
    }

    fn gate_call(&mut self) -> Result<(), QasmError> {
        let (name, pos) = self.ident()?;
        let exprs = self.param_list()?;
        let args = self.arg_list()?;
        self.expect(";")?;
        let empty = HashMap::new();
        let params = exprs
            .iter()
            .map(|e| e.eval(&empty, pos))
            .collect::<Result<Vec<_>, _>>()?;
        let resolved = args
            .iter()
            .map(|a| Ok((matches!(a, Arg::Whole(..)), self.resolve_q(a)?)))
            .collect::<Result<Vec<_>, QasmError>>()?;
        let width = resolved
            .iter()
            .filter(|(whole, _)| *whole)
            .map(|(_, qs)| qs.len())
            .max();
        let reps = match width {
            None => 1,
            Some(w) => {
                if resolved.iter().any(|(whole, qs)| *whole && qs.len() != w) {
                    return Err(QasmError::Semantic {
                        line: pos.line,
                        col: pos.col,
                        message: "register arguments of different sizes".into(),
                    });
                }
                w
            }
        };
        for r in 0..reps {
            let qubits: Vec<usize> = resolved
                .iter()
                .map(|(whole, qs)| if *whole { qs[r] } else { qs[0] })
                .collect();
            self.apply(&name, &params, &qubits, pos, 0)?;
        }
        Ok(())
    }

    fn apply(&mut self, name: &str, params: &[f64], qubits: &[usize], pos: Pos, depth: usize) -> Result<(), QasmError> {
        if depth > 64 {
            return Err(QasmError::Semantic {
                line: pos.line,
                col: pos.col,
                message: format!("gate `{name}` expands too deeply"),
            });
        }
        for (i, q) in qubits.iter().enumerate() {
            if qubits[..i].contains(q) {
                return Err(QasmError::DuplicateOperands {
                    line: pos.line,
                    col: pos.col,
                    name: name.to_string(),
                });
            }
        }
        if let Some(def) = self.defs.get(name).cloned() {
            if def.qargs.len() != qubits.len() || def.params.len() != params.len() {
                return Err(QasmError::Semantic {
                    line: pos.line,
                    col: pos.col,
                    message: format!(
                        "gate `{name}` takes {} parameter(s) and {} qubit(s)",
                        def.params.len(),
                        def.qargs.len()
                    ),
                });
            }
            if let Some(body) = def.body {
                let env: HashMap<String, f64> = def.params.iter().cloned().zip(params.iter().copied()).collect();
                for call in &body {
                    let sub_params = call
                        .params
                        .iter()
                        .map(|e| e.eval(&env, call.pos))
                        .collect::<Result<Vec<_>, _>>()?;
                    let sub_qubits = call
                        .args
                        .iter()
                        .map(|a| {
                            def.qargs.iter().position(|q| q == a).map(|i| qubits[i]).ok_or_else(|| {
                                QasmError::Semantic {
                                    line: call.pos.line,
                                    col: call.pos.col,
                                    message: format!("unknown qubit argument `{a}`"),
                                }
                            })
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    self.apply(&call.name, &sub_params, &sub_qubits, pos, depth + 1)?;
                }
                return Ok(());
            }
        }
        let kind = GateKind::from_name(name);
        match qubits.len() {
            1 if !kind.is_two_qubit() => {}
            2 if kind.is_two_qubit() => {}
            2 => {
                return Err(QasmError::UnsupportedTwoQubitGate {
                    line: pos.line,
                    col: pos.col,
                    name: name.to_string(),
                })
            }
            n if n >= 3 => {
                return Err(QasmError::UnsupportedMultiQubitGate {
                    line: pos.line,
                    col: pos.col,
                    name: name.to_string(),
                    arity: n,
                })
            }
            n => {
                return Err(QasmError::Semantic {
                    line: pos.line,
                    col: pos.col,
                    message: format!("gate `{name}` applied to {n} qubit(s)"),
                })
            }
        }
        self.emit(Gate::new(kind, qubits.to_vec(), params.to_vec()), pos)
    }

    fn emit(&mut self, gate: Gate, pos: Pos) -> Result<(), QasmError> {
        let circuit = self.circuit.as_mut().ok_or(QasmError::Semantic {
            line: pos.line,
            col: pos.col,
            message: "gate before quantum register declaration".into(),
        })?;
        circuit.push(gate).map_err(|e| QasmError::Semantic {
            line: pos.line,
            col: pos.col,
            message: e.to_string(),
        })?;
        Ok(())
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Num(v) => format!("`{v}`"),
        Tok::Int(n) => format!("`{n}`"),
        Tok::Str(s) => format!("\"{s}\""),
        Tok::Sym(s) => format!("`{s}`"),
        Tok::Eof => "end of input".to_string(),
    }
}

/// Parses OpenQASM 2.0 text into a [`Circuit`].
pub fn parse_qasm(text: &str) -> Result<Circuit, QasmError> {
    Parser::new(text)?.program()
}

/// Writes a circuit as OpenQASM 2.0. With `decompose_swaps`, every SWAP is
/// written as three alternating CNOTs.
pub fn emit_qasm(circuit: &Circuit, decompose_swaps: bool) -> String {
    let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let reg = circuit.register();
    let _ = writeln!(out, "qreg {}[{}];", reg, circuit.num_qubits());
    for creg in circuit.cregs() {
        let _ = writeln!(out, "creg {}[{}];", creg.name, creg.size);
    }
    for gate in circuit.gates() {
        let q = |i: usize| format!("{}[{}]", reg, gate.qubits[i]);
        match &gate.kind {
            GateKind::Measure { creg, bit } => {
                let _ = writeln!(out, "measure {} -> {}[{}];", q(0), creg, bit);
            }
            GateKind::Swap if decompose_swaps => {
                let (a, b) = (q(0), q(1));
                let _ = writeln!(out, "cx {a},{b};\ncx {b},{a};\ncx {a},{b};");
            }
            kind => {
                out.push_str(kind.name());
                if !gate.params.is_empty() {
                    let ps: Vec<String> = gate.params.iter().map(|p| format!("{p:?}")).collect();
                    let _ = write!(out, "({})", ps.join(","));
                }
                let qs: Vec<String> = (0..gate.qubits.len()).map(q).collect();
                let _ = writeln!(out, " {};", qs.join(","));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cnot() {
        let c = parse_qasm("qreg q[2]; cx q[0],q[1];").unwrap();
        assert_eq!(c.num_qubits(), 2);
        assert_eq!(c.gates(), &[Gate::cx(0, 1)]);
    }

    #[test]
    fn duplicate_operands_rejected() {
        let err = parse_qasm("qreg q[1]; cx q[0],q[0];").unwrap_err();
        assert!(matches!(err, QasmError::DuplicateOperands { line: 1, .. }), "{err:?}");
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_qasm("OPENQASM 2.0;\nqreg q[2];\ncx q[0] q[1];").unwrap_err();
        assert!(matches!(err, QasmError::Syntax { line: 3, col: 9, .. }), "{err:?}");
        let err = parse_qasm("qreg q[2];\nqreg r[2];").unwrap_err();
        assert!(matches!(err, QasmError::MultipleQuantumRegisters { line: 2, .. }));
        let err = parse_qasm("qreg q[2];\nh q[2];").unwrap_err();
        assert!(matches!(err, QasmError::OperandOutOfRange { index: 2, size: 2, .. }));
        let err = parse_qasm("include \"qelib1.inc\";\nqreg q[3];\nccx q[0],q[1],q[2];").unwrap_err();
        assert!(matches!(
            err,
            QasmError::UnsupportedMultiQubitGate { arity: 3, line: 3, .. }
        ));
        let err = parse_qasm("qreg q[2];\nfoo q[0],q[1];").unwrap_err();
        assert!(matches!(err, QasmError::UnsupportedTwoQubitGate { .. }));
    }

    #[test]
    fn unknown_one_qubit_gates_become_opaque() {
        let c = parse_qasm("qreg q[1]; sx q[0]; foo(0.5) q[0];").unwrap();
        assert_eq!(c.gates()[0].kind, GateKind::Other("sx".into()));
        assert_eq!(c.gates()[1].kind, GateKind::Other("foo".into()));
        assert_eq!(c.gates()[1].params, vec![0.5]);
    }

    #[test]
    fn parameters_and_pi() {
        let c = parse_qasm("qreg q[1]; rz(pi/4) q[0]; u3(-pi/2, 0.5*2, 1e-3) q[0];").unwrap();
        assert_eq!(c.gates()[0].params, vec![std::f64::consts::PI / 4.0]);
        assert_eq!(c.gates()[1].params, vec![-std::f64::consts::PI / 2.0, 1.0, 1e-3]);
    }

    #[test]
    fn broadcast_measure_and_barrier() {
        let src = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[3];\ncreg c[3];\nh q;\nbarrier q;\nmeasure q -> c;\n";
        let c = parse_qasm(src).unwrap();
        assert_eq!(c.len(), 3 + 1 + 3);
        assert_eq!(c.gates()[3].kind, GateKind::Barrier);
        assert_eq!(c.gates()[3].qubits, vec![0, 1, 2]);
        assert_eq!(
            c.gates()[6].kind,
            GateKind::Measure {
                creg: "c".into(),
                bit: 2
            }
        );
        assert_eq!(c.num_gates(), 3);
    }

    #[test]
    fn gate_definitions_expand_inline() {
        let src = "qreg q[2];\ngate mine(theta) a,b { rz(theta/2) b; cx a,b; }\nmine(pi) q[1],q[0];";
        let c = parse_qasm(src).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.gates()[0].qubits, vec![0]);
        assert_eq!(c.gates()[0].params, vec![std::f64::consts::PI / 2.0]);
        assert_eq!(
            c.gates()[1],
            Gate {
                seq_index: 1,
                ..Gate::cx(1, 0)
            }
        );
    }

    #[test]
    fn qelib_composites_expand() {
        let c = parse_qasm("include \"qelib1.inc\"; qreg q[2]; cz q[0],q[1];").unwrap();
        let names: Vec<_> = c.gates().iter().map(|g| g.kind.name().to_string()).collect();
        assert_eq!(names, vec!["h", "cx", "h"]);
    }

    #[test]
    fn comments_ignored() {
        let c = parse_qasm("// header\nqreg q[2]; // reg\ncx q[0],q[1]; // gate\n").unwrap();
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn emit_decomposes_swap_into_three_cnots() {
        let c = Circuit::from_gates(2, vec![Gate::swap(0, 1)]).unwrap();
        let text = emit_qasm(&c, true);
        assert_eq!(text.matches("cx ").count(), 3);
        assert!(!text.contains("swap"));
        let back = parse_qasm(&text).unwrap();
        assert_eq!(
            back.gates().iter().map(|g| &g.qubits[..]).collect::<Vec<_>>(),
            vec![&[0, 1][..], &[1, 0], &[0, 1]]
        );
    }

    #[test]
    fn emit_empty_circuit_is_header_only() {
        let text = emit_qasm(&Circuit::new(3), false);
        assert_eq!(text, "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[3];\n");
    }

    #[test]
    fn round_trip_with_directives() {
        let src = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[3];\ncreg c[2];\nrz(0.1) q[0];\nswap q[0],q[2];\nreset q[1];\nbarrier q[0],q[1];\nmeasure q[2] -> c[1];\n";
        let c = parse_qasm(src).unwrap();
        assert_eq!(parse_qasm(&emit_qasm(&c, false)).unwrap(), c);
    }
}
