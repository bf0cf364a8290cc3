//! OpenQASM 2.0 subset frontend.
//!
//! Registers are laid out in declaration order: the first `qreg` occupies the
//! lowest qubit indices, so `q[0]` of the first register is qubit 0 (the
//! leftmost MPS site). Gates on three or more qubits and user-defined gates
//! are expanded into one- and two-qubit gates; `swap` and other two-qubit
//! library gates stay single 4×4 gates. `barrier` is ignored and terminal
//! `measure` statements are dropped. A gate on an already measured qubit,
//! `reset` and `if` are rejected. See `docs/qasm-subset.md` for the grammar.

use std::collections::HashMap;
use std::path::Path;

use super::{library, Circuit, CircuitSource, Gate, Matrix2, Matrix4};
use crate::error::{Error, Result};
use crate::tensor::C64;

const MAX_EXPANSION_DEPTH: usize = 64;

type Build1 = fn(&[f64]) -> Matrix2;
type Build4 = fn(&[f64]) -> Matrix4;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Real(f64),
    Int(u64),
    Str(String),
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn lex(src: &str) -> Result<Vec<Token>> {
    const SYMBOLS: [&str; 15] = [
        "->", "==", ";", ",", "(", ")", "[", "]", "{", "}", "+", "-", "*", "/", "^",
    ];
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (tline, tcol) = (line, col);
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
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            i += 2;
            col += 2;
            loop {
                match chars.get(i) {
                    None => return Err(parse_err(tline, tcol, "unterminated block comment")),
                    Some('*') if chars.get(i + 1) == Some(&'/') => {
                        i += 2;
                        col += 2;
                        break;
                    }
                    Some('\n') => {
                        i += 1;
                        line += 1;
                        col = 1;
                    }
                    Some(_) => {
                        i += 1;
                        col += 1;
                    }
                }
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line: tline,
                col: tcol,
            });
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()))
        {
            let start = i;
            let mut real = false;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if chars.get(i) == Some(&'.') {
                real = true;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if matches!(chars.get(i), Some('e') | Some('E')) {
                let mut j = i + 1;
                if matches!(chars.get(j), Some('+') | Some('-')) {
                    j += 1;
                }
                if chars.get(j).is_some_and(|d| d.is_ascii_digit()) {
                    real = true;
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            col += i - start;
            let tok = if real {
                Tok::Real(
                    text.parse()
                        .map_err(|_| parse_err(tline, tcol, format!("bad number '{text}'")))?,
                )
            } else {
                Tok::Int(
                    text.parse()
                        .map_err(|_| parse_err(tline, tcol, format!("bad integer '{text}'")))?,
                )
            };
            out.push(Token {
                tok,
                line: tline,
                col: tcol,
            });
            continue;
        }
        if c == '"' {
            let start = i + 1;
            i += 1;
            while i < chars.len() && chars[i] != '"' && chars[i] != '\n' {
                i += 1;
            }
            if chars.get(i) != Some(&'"') {
                return Err(parse_err(tline, tcol, "unterminated string"));
            }
            let text: String = chars[start..i].iter().collect();
            i += 1;
            col += text.chars().count() + 2;
            out.push(Token {
                tok: Tok::Str(text),
                line: tline,
                col: tcol,
            });
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        let Some(sym) = SYMBOLS.iter().find(|s| rest.starts_with(**s)) else {
            return Err(parse_err(
                tline,
                tcol,
                format!("unexpected character '{c}'"),
            ));
        };
        i += sym.len();
        col += sym.len();
        out.push(Token {
            tok: Tok::Sym(sym),
            line: tline,
            col: tcol,
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
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
    fn eval(&self, env: &HashMap<String, f64>) -> std::result::Result<f64, String> {
        Ok(match self {
            Expr::Num(x) => *x,
            Expr::Param(name) => *env
                .get(name)
                .ok_or_else(|| format!("unknown parameter '{name}'"))?,
            Expr::Neg(e) => -e.eval(env)?,
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(env)?, b.eval(env)?);
                match op {
                    '+' => a + b,
                    '-' => a - b,
                    '*' => a * b,
                    '/' => a / b,
                    _ => a.powf(b),
                }
            }
            Expr::Call(f, e) => {
                let x = e.eval(env)?;
                match f.as_str() {
                    "sin" => x.sin(),
                    "cos" => x.cos(),
                    "tan" => x.tan(),
                    "asin" => x.asin(),
                    "acos" => x.acos(),
                    "atan" => x.atan(),
                    "exp" => x.exp(),
                    "ln" => x.ln(),
                    "sqrt" => x.sqrt(),
                    other => return Err(format!("unknown function '{other}'")),
                }
            }
        })
    }
}

const FUNCTIONS: [&str; 9] = [
    "sin", "cos", "tan", "asin", "acos", "atan", "exp", "ln", "sqrt",
];

#[derive(Clone, Debug)]
struct BodyOp {
    name: String,
    args: Vec<Expr>,
    qargs: Vec<String>,
    line: usize,
    col: usize,
}

#[derive(Clone, Debug)]
struct GateDef {
    params: Vec<String>,
    qargs: Vec<String>,
    body: Vec<BodyOp>,
    opaque: bool,
}

/// Register operand: `name` or `name[index]`.
struct Operand {
    name: String,
    index: Option<usize>,
    line: usize,
    col: usize,
}

struct Register {
    name: String,
    offset: usize,
    size: usize,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    qregs: Vec<Register>,
    cregs: Vec<(String, usize)>,
    defs: HashMap<String, GateDef>,
    gates: Vec<Gate>,
    measured: Vec<bool>,
    num_qubits: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if !matches!(t.tok, Tok::Eof) {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, message: impl Into<String>) -> Error {
        let t = self.peek();
        parse_err(t.line, t.col, message)
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek().tok, Tok::Sym(x) if x == s)
    }

    fn expect_sym(&mut self, s: &str) -> Result<()> {
        if self.is_sym(s) {
            self.next();
            Ok(())
        } else {
            Err(self.error_here(format!(
                "expected '{s}', found {}",
                describe(&self.peek().tok)
            )))
        }
    }

    fn expect_ident(&mut self) -> Result<String> {
        match self.peek().tok.clone() {
            Tok::Ident(s) => {
                self.next();
                Ok(s)
            }
            other => {
                Err(self.error_here(format!("expected identifier, found {}", describe(&other))))
            }
        }
    }

    fn expect_int(&mut self) -> Result<usize> {
        match self.peek().tok {
            Tok::Int(v) => {
                self.next();
                usize::try_from(v).map_err(|_| self.error_here("integer too large"))
            }
            ref other => {
                Err(self.error_here(format!("expected integer, found {}", describe(other))))
            }
        }
    }

    fn run(&mut self) -> Result<()> {
        if matches!(&self.peek().tok, Tok::Ident(s) if s == "OPENQASM") {
            let line = self.next().line;
            let version = match self.next().tok {
                Tok::Real(v) => v,
                Tok::Int(v) => v as f64,
                other => {
                    return Err(parse_err(
                        line,
                        1,
                        format!("expected version, found {}", describe(&other)),
                    ))
                }
            };
            if !(2.0..3.0).contains(&version) {
                return Err(Error::Unsupported {
                    line,
                    feature: format!("OpenQASM version {version}"),
                });
            }
            self.expect_sym(";")?;
        }
        while !matches!(self.peek().tok, Tok::Eof) {
            self.statement()?;
        }
        if self.num_qubits == 0 {
            return Err(self.error_here("no quantum register declared"));
        }
        Ok(())
    }

    fn statement(&mut self) -> Result<()> {
        let start = self.peek().clone();
        let Tok::Ident(word) = start.tok.clone() else {
            return Err(self.error_here(format!(
                "expected a statement, found {}",
                describe(&start.tok)
            )));
        };
        match word.as_str() {
            "include" => {
                self.next();
                let file = match self.next().tok {
                    Tok::Str(s) => s,
                    other => {
                        return Err(parse_err(
                            start.line,
                            start.col,
                            format!("expected file name, found {}", describe(&other)),
                        ))
                    }
                };
                self.expect_sym(";")?;
                if file != "qelib1.inc" {
                    return Err(Error::Unsupported {
                        line: start.line,
                        feature: format!("include of '{file}' (only qelib1.inc is built in)"),
                    });
                }
            }
            "qreg" | "creg" => {
                self.next();
                let name = self.expect_ident()?;
                self.expect_sym("[")?;
                let size = self.expect_int()?;
                self.expect_sym("]")?;
                self.expect_sym(";")?;
                if size == 0 {
                    return Err(parse_err(
                        start.line,
                        start.col,
                        format!("register '{name}' has size 0"),
                    ));
                }
                let taken = self.qregs.iter().any(|r| r.name == name)
                    || self.cregs.iter().any(|(n, _)| *n == name);
                if taken {
                    return Err(parse_err(
                        start.line,
                        start.col,
                        format!("register '{name}' redeclared"),
                    ));
                }
                if word == "qreg" {
                    self.qregs.push(Register {
                        name,
                        offset: self.num_qubits,
                        size,
                    });
                    self.num_qubits += size;
                    self.measured.resize(self.num_qubits, false);
                } else {
                    self.cregs.push((name, size));
                }
            }
            "gate" | "opaque" => self.gate_definition(word == "opaque")?,
            "measure" => {
                self.next();
                let q = self.operand()?;
                self.expect_sym("->")?;
                let c = self.operand()?;
                self.expect_sym(";")?;
                let qubits = self.resolve(&q)?;
                let csize = self.resolve_creg(&c)?;
                if q.index.is_none() && c.index.is_none() && qubits.len() != csize {
                    return Err(parse_err(
                        start.line,
                        start.col,
                        "measure between registers of different sizes",
                    ));
                }
                for q in qubits {
                    self.measured[q] = true;
                }
            }
            "reset" => {
                return Err(Error::Unsupported {
                    line: start.line,
                    feature: "reset".into(),
                })
            }
            "if" => {
                return Err(Error::Unsupported {
                    line: start.line,
                    feature: "classically controlled operation (if)".into(),
                })
            }
            "barrier" => {
                self.next();
                loop {
                    let op = self.operand()?;
                    self.resolve(&op)?;
                    if self.is_sym(",") {
                        self.next();
                    } else {
                        break;
                    }
                }
                self.expect_sym(";")?;
            }
            _ => self.gate_application()?,
        }
        Ok(())
    }

    fn gate_definition(&mut self, opaque: bool) -> Result<()> {
        let start = self.next();
        let name = self.expect_ident()?;
        let mut params = Vec::new();
        if self.is_sym("(") {
            self.next();
            if !self.is_sym(")") {
                params = self.ident_list()?;
            }
            self.expect_sym(")")?;
        }
        let qargs = self.ident_list()?;
        let mut body = Vec::new();
        if opaque {
            self.expect_sym(";")?;
        } else {
            self.expect_sym("{")?;
            while !self.is_sym("}") {
                let t = self.peek().clone();
                let op_name = self.expect_ident()?;
                if op_name == "barrier" {
                    self.ident_list()?;
                    self.expect_sym(";")?;
                    continue;
                }
                let mut args = Vec::new();
                if self.is_sym("(") {
                    self.next();
                    if !self.is_sym(")") {
                        args = self.expr_list()?;
                    }
                    self.expect_sym(")")?;
                }
                let op_qargs = self.ident_list()?;
                self.expect_sym(";")?;
                for q in &op_qargs {
                    if !qargs.contains(q) {
                        return Err(parse_err(
                            t.line,
                            t.col,
                            format!("'{q}' is not an argument of gate '{name}'"),
                        ));
                    }
                }
                body.push(BodyOp {
                    name: op_name,
                    args,
                    qargs: op_qargs,
                    line: t.line,
                    col: t.col,
                });
            }
            self.expect_sym("}")?;
        }
        if name == "U" || name == "CX" {
            return Err(parse_err(
                start.line,
                start.col,
                format!("cannot redefine builtin '{name}'"),
            ));
        }
        self.defs.insert(
            name,
            GateDef {
                params,
                qargs,
                body,
                opaque,
            },
        );
        Ok(())
    }

    fn ident_list(&mut self) -> Result<Vec<String>> {
        let mut out = vec![self.expect_ident()?];
        while self.is_sym(",") {
            self.next();
            out.push(self.expect_ident()?);
        }
        Ok(out)
    }

    fn expr_list(&mut self) -> Result<Vec<Expr>> {
        let mut out = vec![self.expr()?];
        while self.is_sym(",") {
            self.next();
            out.push(self.expr()?);
        }
        Ok(out)
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while self.is_sym("+") || self.is_sym("-") {
            let op = if self.is_sym("+") { '+' } else { '-' };
            self.next();
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while self.is_sym("*") || self.is_sym("/") {
            let op = if self.is_sym("*") { '*' } else { '/' };
            self.next();
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.is_sym("-") {
            self.next();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.is_sym("+") {
            self.next();
            return self.unary();
        }
        let base = self.atom()?;
        if self.is_sym("^") {
            self.next();
            return Ok(Expr::Bin('^', Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let t = self.next();
        match t.tok {
            Tok::Real(v) => Ok(Expr::Num(v)),
            Tok::Int(v) => Ok(Expr::Num(v as f64)),
            Tok::Ident(name) if name == "pi" => Ok(Expr::Num(std::f64::consts::PI)),
            Tok::Ident(name) if FUNCTIONS.contains(&name.as_str()) => {
                self.expect_sym("(")?;
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(Expr::Call(name, Box::new(e)))
            }
            Tok::Ident(name) => Ok(Expr::Param(name)),
            Tok::Sym("(") => {
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            other => Err(parse_err(
                t.line,
                t.col,
                format!("expected expression, found {}", describe(&other)),
            )),
        }
    }

    fn operand(&mut self) -> Result<Operand> {
        let t = self.peek().clone();
        let name = self.expect_ident()?;
        let mut index = None;
        if self.is_sym("[") {
            self.next();
            index = Some(self.expect_int()?);
            self.expect_sym("]")?;
        }
        Ok(Operand {
            name,
            index,
            line: t.line,
            col: t.col,
        })
    }

    fn resolve(&self, op: &Operand) -> Result<Vec<usize>> {
        let Some(reg) = self.qregs.iter().find(|r| r.name == op.name) else {
            return Err(parse_err(
                op.line,
                op.col,
                format!("unknown quantum register '{}'", op.name),
            ));
        };
        match op.index {
            Some(i) if i >= reg.size => Err(parse_err(
                op.line,
                op.col,
                format!("index {i} out of range for '{}[{}]'", reg.name, reg.size),
            )),
            Some(i) => Ok(vec![reg.offset + i]),
            None => Ok((reg.offset..reg.offset + reg.size).collect()),
        }
    }

    fn resolve_creg(&self, op: &Operand) -> Result<usize> {
        let Some((_, size)) = self.cregs.iter().find(|(n, _)| *n == op.name) else {
            return Err(parse_err(
                op.line,
                op.col,
                format!("unknown classical register '{}'", op.name),
            ));
        };
        match op.index {
            Some(i) if i >= *size => Err(parse_err(
                op.line,
                op.col,
                format!("index {i} out of range for '{}'", op.name),
            )),
            Some(_) => Ok(1),
            None => Ok(*size),
        }
    }

    fn gate_application(&mut self) -> Result<()> {
        let start = self.peek().clone();
        let name = self.expect_ident()?;
        let mut args = Vec::new();
        if self.is_sym("(") {
            self.next();
            if !self.is_sym(")") {
                args = self.expr_list()?;
            }
            self.expect_sym(")")?;
        }
        let mut operands = vec![self.operand()?];
        while self.is_sym(",") {
            self.next();
            operands.push(self.operand()?);
        }
        self.expect_sym(";")?;

        let env = HashMap::new();
        let params = args
            .iter()
            .map(|e| e.eval(&env))
            .collect::<std::result::Result<Vec<f64>, String>>()
            .map_err(|m| parse_err(start.line, start.col, m))?;
        let resolved = operands
            .iter()
            .map(|o| self.resolve(o))
            .collect::<Result<Vec<_>>>()?;

        let width = resolved
            .iter()
            .map(Vec::len)
            .filter(|&l| l > 1)
            .max()
            .unwrap_or(1);
        if resolved.iter().any(|r| r.len() != 1 && r.len() != width) {
            return Err(parse_err(
                start.line,
                start.col,
                "register operands of different sizes",
            ));
        }
        for k in 0..width {
            let qubits: Vec<usize> = resolved
                .iter()
                .map(|r| if r.len() == 1 { r[0] } else { r[k] })
                .collect();
            self.expand(&name, &params, &qubits, start.line, start.col, 0)?;
        }
        Ok(())
    }

    fn emit1(&mut self, label: &str, q: usize, m: Matrix2, line: usize) -> Result<()> {
        self.check_unmeasured(label, &[q], line)?;
        self.gates.push(Gate::one(label, q, m)?);
        Ok(())
    }

    fn emit2(&mut self, label: &str, a: usize, b: usize, m: Matrix4, line: usize) -> Result<()> {
        self.check_unmeasured(label, &[a, b], line)?;
        self.gates.push(Gate::two(label, a, b, m)?);
        Ok(())
    }

    fn check_unmeasured(&self, label: &str, qubits: &[usize], line: usize) -> Result<()> {
        if let Some(&q) = qubits.iter().find(|&&q| self.measured[q]) {
            return Err(Error::Unsupported {
                line,
                feature: format!("mid-circuit measurement (gate '{label}' acts on qubit {q} after it was measured)"),
            });
        }
        Ok(())
    }

    fn expand(
        &mut self,
        name: &str,
        params: &[f64],
        qubits: &[usize],
        line: usize,
        col: usize,
        depth: usize,
    ) -> Result<()> {
        if depth > MAX_EXPANSION_DEPTH {
            return Err(parse_err(
                line,
                col,
                format!("gate '{name}' expands too deeply"),
            ));
        }
        let mut distinct = qubits.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() != qubits.len() {
            return Err(parse_err(
                line,
                col,
                format!("gate '{name}' repeats a qubit argument"),
            ));
        }

        if let Some(def) = self.defs.get(name).cloned() {
            if def.opaque {
                return Err(Error::Unsupported {
                    line,
                    feature: format!("opaque gate '{name}'"),
                });
            }
            if def.params.len() != params.len() || def.qargs.len() != qubits.len() {
                return Err(parse_err(
                    line,
                    col,
                    format!(
                        "gate '{name}' takes {} parameters and {} qubits, got {} and {}",
                        def.params.len(),
                        def.qargs.len(),
                        params.len(),
                        qubits.len()
                    ),
                ));
            }
            let env: HashMap<String, f64> = def
                .params
                .iter()
                .cloned()
                .zip(params.iter().copied())
                .collect();
            let qmap: HashMap<&str, usize> = def
                .qargs
                .iter()
                .map(String::as_str)
                .zip(qubits.iter().copied())
                .collect();
            for op in &def.body {
                let p = op
                    .args
                    .iter()
                    .map(|e| e.eval(&env))
                    .collect::<std::result::Result<Vec<f64>, String>>()
                    .map_err(|m| parse_err(op.line, op.col, m))?;
                let q: Vec<usize> = op.qargs.iter().map(|a| qmap[a.as_str()]).collect();
                // errors inside a definition are reported at the call site line
                self.expand(&op.name, &p, &q, line, col, depth + 1)?;
            }
            return Ok(());
        }

        let arity_err = |want_p: usize, want_q: usize| {
            parse_err(
                line,
                col,
                format!(
                    "gate '{name}' takes {want_p} parameters and {want_q} qubits, got {} and {}",
                    params.len(),
                    qubits.len()
                ),
            )
        };
        let one = |want_p: usize| -> Result<()> {
            if params.len() != want_p || qubits.len() != 1 {
                Err(arity_err(want_p, 1))
            } else {
                Ok(())
            }
        };
        let two = |want_p: usize| -> Result<()> {
            if params.len() != want_p || qubits.len() != 2 {
                Err(arity_err(want_p, 2))
            } else {
                Ok(())
            }
        };
        let single: Option<(usize, Build1)> = match name {
            "U" | "u3" | "u" => Some((3, |p| library::u3(p[0], p[1], p[2]))),
            "u2" => Some((2, |p| library::u2(p[0], p[1]))),
            "u1" | "p" => Some((1, |p| library::u1(p[0]))),
            "u0" => Some((1, |_| library::id())),
            "id" | "i" => Some((0, |_| library::id())),
            "x" => Some((0, |_| library::x())),
            "y" => Some((0, |_| library::y())),
            "z" => Some((0, |_| library::z())),
            "h" => Some((0, |_| library::h())),
            "s" => Some((0, |_| library::s())),
            "sdg" => Some((0, |_| library::sdg())),
            "t" => Some((0, |_| library::t())),
            "tdg" => Some((0, |_| library::tdg())),
            "sx" => Some((0, |_| library::sx())),
            "sxdg" => Some((0, |_| library::sxdg())),
            "rx" => Some((1, |p| library::rx(p[0]))),
            "ry" => Some((1, |p| library::ry(p[0]))),
            "rz" => Some((1, |p| library::rz(p[0]))),
            _ => None,
        };
        if let Some((np, build)) = single {
            one(np)?;
            return self.emit1(name, qubits[0], build(params), line);
        }

        let double: Option<(usize, Build4)> = match name {
            "CX" | "cx" => Some((0, |_| library::cx())),
            "cy" => Some((0, |_| library::cy())),
            "cz" => Some((0, |_| library::cz())),
            "ch" => Some((0, |_| library::ch())),
            "csx" => Some((0, |_| library::controlled(&library::sx()))),
            "swap" => Some((0, |_| library::swap())),
            "crx" => Some((1, |p| library::controlled(&library::rx(p[0])))),
            "cry" => Some((1, |p| library::controlled(&library::ry(p[0])))),
            "crz" => Some((1, |p| library::controlled(&library::rz(p[0])))),
            "cu1" | "cp" => Some((1, |p| library::controlled(&library::u1(p[0])))),
            "cu3" => Some((3, |p| library::controlled(&library::u3(p[0], p[1], p[2])))),
            "cu" => Some((4, |p| {
                let g = C64::from_polar(1.0, p[3]);
                library::controlled(&library::u3(p[0], p[1], p[2]).map(|z| z * g))
            })),
            "rzz" => Some((1, |p| library::rzz(p[0]))),
            "rxx" => Some((1, |p| library::rxx(p[0]))),
            _ => None,
        };
        if let Some((np, build)) = double {
            two(np)?;
            return self.emit2(name, qubits[0], qubits[1], build(params), line);
        }

        match name {
            "ccx" => {
                if !params.is_empty() || qubits.len() != 3 {
                    return Err(arity_err(0, 3));
                }
                let (a, b, c) = (qubits[0], qubits[1], qubits[2]);
                self.emit_toffoli(a, b, c, line)
            }
            "cswap" => {
                if !params.is_empty() || qubits.len() != 3 {
                    return Err(arity_err(0, 3));
                }
                let (a, b, c) = (qubits[0], qubits[1], qubits[2]);
                self.emit2("cx", c, b, library::cx(), line)?;
                self.emit_toffoli(a, b, c, line)?;
                self.emit2("cx", c, b, library::cx(), line)
            }
            _ => Err(parse_err(line, col, format!("unknown gate '{name}'"))),
        }
    }

    /// Standard 6-CX, 9 single-qubit gate Toffoli.
    fn emit_toffoli(&mut self, a: usize, b: usize, c: usize, line: usize) -> Result<()> {
        self.emit1("h", c, library::h(), line)?;
        self.emit2("cx", b, c, library::cx(), line)?;
        self.emit1("tdg", c, library::tdg(), line)?;
        self.emit2("cx", a, c, library::cx(), line)?;
        self.emit1("t", c, library::t(), line)?;
        self.emit2("cx", b, c, library::cx(), line)?;
        self.emit1("tdg", c, library::tdg(), line)?;
        self.emit2("cx", a, c, library::cx(), line)?;
        self.emit1("t", b, library::t(), line)?;
        self.emit1("t", c, library::t(), line)?;
        self.emit1("h", c, library::h(), line)?;
        self.emit2("cx", a, b, library::cx(), line)?;
        self.emit1("t", a, library::t(), line)?;
        self.emit1("tdg", b, library::tdg(), line)?;
        self.emit2("cx", a, b, library::cx(), line)
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Real(v) => format!("'{v}'"),
        Tok::Int(v) => format!("'{v}'"),
        Tok::Str(s) => format!("\"{s}\""),
        Tok::Sym(s) => format!("'{s}'"),
        Tok::Eof => "end of input".into(),
    }
}

/// Parses OpenQASM 2.0 source into a circuit of one- and two-qubit gates.
pub fn parse_qasm(text: &str) -> Result<Circuit> {
    let mut parser = Parser {
        toks: lex(text)?,
        pos: 0,
        qregs: Vec::new(),
        cregs: Vec::new(),
        defs: HashMap::new(),
        gates: Vec::new(),
        measured: Vec::new(),
        num_qubits: 0,
    };
    parser.run()?;
    let mut circuit =
        Circuit::new(parser.num_qubits).with_source(CircuitSource::Qasm { path: None });
    for g in parser.gates {
        circuit.push(g)?;
    }
    Ok(circuit)
}

pub fn parse_qasm_file(path: impl AsRef<Path>) -> Result<Circuit> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_qasm(&text)?.with_source(CircuitSource::Qasm {
        path: Some(path.display().to_string()),
    }))
}
