//! Scalar expressions over `x1..xd`.
//!
//! Grammar, loosest to tightest:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?          right-associative
//! primary := number | 'pi' | xN | func '(' args ')' | '(' sum ')'
//! ```
//!
//! so `-x1^2` is `-(x1^2)` and `2^3^2` is `2^(3^2)`. Functions: `sin cos tan
//! exp log sqrt abs` (one argument) and `min max` (two).
//!
//! A parsed [`Expr`] keeps its tree and a postfix program; evaluation runs the
//! program on a small stack.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::problem::ScalarFn;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Abs,
    Min,
    Max,
}

impl Func {
    pub const ALL: [Func; 9] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Abs,
        Func::Min,
        Func::Max,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Min => "min",
            Func::Max => "max",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            _ => 1,
        }
    }

    fn lookup(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn apply1(self, a: f64) -> f64 {
        match self {
            Func::Sin => a.sin(),
            Func::Cos => a.cos(),
            Func::Tan => a.tan(),
            Func::Exp => a.exp(),
            Func::Log => a.ln(),
            Func::Sqrt => a.sqrt(),
            Func::Abs => a.abs(),
            Func::Min | Func::Max => f64::NAN,
        }
    }

    pub fn apply2(self, a: f64, b: f64) -> f64 {
        match self {
            Func::Min => a.min(b),
            Func::Max => a.max(b),
            _ => f64::NAN,
        }
    }
}

impl BinaryOp {
    pub fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            BinaryOp::Add => a + b,
            BinaryOp::Sub => a - b,
            BinaryOp::Mul => a * b,
            BinaryOp::Div => a / b,
            BinaryOp::Pow => a.powf(b),
        }
    }

    fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
            BinaryOp::Pow => '^',
        }
    }
}

/// Expression tree. Variable indices are zero-based (`x1` is `Var(0)`).
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var(usize),
    Unary(UnaryOp, Box<Node>),
    Binary(BinaryOp, Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

impl fmt::Display for Node {
    /// Fully parenthesized; reparses to the same tree for trees the parser builds.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Const(c) => write!(f, "{c}"),
            Node::Var(i) => write!(f, "x{}", i + 1),
            Node::Unary(UnaryOp::Neg, a) => write!(f, "(-{a})"),
            Node::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Node::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Instr {
    Const(f64),
    Var(usize),
    Neg,
    Bin(BinaryOp),
    Call1(Func),
    Call2(Func),
}

/// A parsed, validated expression in `dim` variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    root: Node,
    program: Vec<Instr>,
    stack_depth: usize,
    dim: usize,
    source: String,
}

impl Expr {
    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// IEEE evaluation. Domain errors (log of a negative number, ...) give NaN.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        debug_assert!(x.len() >= self.dim);
        let mut stack: Vec<f64> = Vec::with_capacity(self.stack_depth);
        for ins in &self.program {
            match *ins {
                Instr::Const(c) => stack.push(c),
                Instr::Var(i) => stack.push(x[i]),
                Instr::Neg => {
                    let a = stack.pop().expect("stack");
                    stack.push(-a);
                }
                Instr::Bin(op) => {
                    let b = stack.pop().expect("stack");
                    let a = stack.pop().expect("stack");
                    stack.push(op.apply(a, b));
                }
                Instr::Call1(func) => {
                    let a = stack.pop().expect("stack");
                    stack.push(func.apply1(a));
                }
                Instr::Call2(func) => {
                    let b = stack.pop().expect("stack");
                    let a = stack.pop().expect("stack");
                    stack.push(func.apply2(a, b));
                }
            }
        }
        stack.pop().expect("non-empty program")
    }
}

impl ScalarFn for Expr {
    fn eval(&self, x: &[f64]) -> f64 {
        self.evaluate(x)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}

/// Parses `src` as an expression in variables `x1..x{dim}`.
pub fn parse(src: &str, dim: usize) -> Result<Expr> {
    let tokens = tokenize(src)?;
    if tokens.is_empty() {
        return Err(Error::Syntax {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let mut p = Parser {
        tokens,
        pos: 0,
        dim,
        end: src.len(),
    };
    let root = p.sum()?;
    if let Some(t) = p.tokens.get(p.pos) {
        return Err(Error::Syntax {
            offset: t.offset,
            message: format!("unexpected {}", t.kind.describe()),
        });
    }
    let mut program = Vec::new();
    compile(&root, &mut program);
    let stack_depth = max_depth(&program);
    Ok(Expr {
        root,
        program,
        stack_depth,
        dim,
        source: src.to_string(),
    })
}

/// Evaluates `expr` at `x`.
pub fn evaluate_expr(expr: &Expr, x: &[f64]) -> f64 {
    expr.evaluate(x)
}

fn compile(node: &Node, out: &mut Vec<Instr>) {
    match node {
        Node::Const(c) => out.push(Instr::Const(*c)),
        Node::Var(i) => out.push(Instr::Var(*i)),
        Node::Unary(UnaryOp::Neg, a) => {
            compile(a, out);
            out.push(Instr::Neg);
        }
        Node::Binary(op, a, b) => {
            compile(a, out);
            compile(b, out);
            out.push(Instr::Bin(*op));
        }
        Node::Call(func, args) => {
            for a in args {
                compile(a, out);
            }
            out.push(if args.len() == 1 {
                Instr::Call1(*func)
            } else {
                Instr::Call2(*func)
            });
        }
    }
}

fn max_depth(program: &[Instr]) -> usize {
    let mut depth: usize = 0;
    let mut max = 0;
    for ins in program {
        match ins {
            Instr::Const(_) | Instr::Var(_) => depth += 1,
            Instr::Bin(_) | Instr::Call2(_) => depth -= 1,
            Instr::Neg | Instr::Call1(_) => {}
        }
        max = max.max(depth);
    }
    max
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Number(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

impl TokenKind {
    fn describe(&self) -> String {
        match self {
            TokenKind::Number(v) => format!("number {v}"),
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Op(c) => format!("`{c}`"),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::Comma => "`,`".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    offset: usize,
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                out.push(Token {
                    kind: TokenKind::Op(b as char),
                    offset: start,
                });
                i += 1;
            }
            b'(' | b')' | b',' => {
                let kind = match b {
                    b'(' => TokenKind::LParen,
                    b')' => TokenKind::RParen,
                    _ => TokenKind::Comma,
                };
                out.push(Token {
                    kind,
                    offset: start,
                });
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &src[start..i];
                let value: f64 = text.parse().map_err(|_| Error::Syntax {
                    offset: start,
                    message: format!("malformed number `{text}`"),
                })?;
                out.push(Token {
                    kind: TokenKind::Number(value),
                    offset: start,
                });
            }
            b if b.is_ascii_alphabetic() || b == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Token {
                    kind: TokenKind::Ident(src[start..i].to_string()),
                    offset: start,
                });
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(Error::Syntax {
                    offset: start,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    dim: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |t| t.offset)
    }

    fn eat_op(&mut self, ops: &[char]) -> Option<char> {
        match self.peek() {
            Some(TokenKind::Op(c)) if ops.contains(c) => {
                let c = *c;
                self.pos += 1;
                Some(c)
            }
            _ => None,
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Result<()> {
        if self.peek() == Some(&kind) {
            self.pos += 1;
            Ok(())
        } else {
            let found = self
                .peek()
                .map_or("end of input".to_string(), TokenKind::describe);
            Err(Error::Syntax {
                offset: self.offset(),
                message: format!("expected {}, found {found}", kind.describe()),
            })
        }
    }

    fn sum(&mut self) -> Result<Node> {
        let mut lhs = self.product()?;
        while let Some(c) = self.eat_op(&['+', '-']) {
            let rhs = self.product()?;
            let op = if c == '+' { BinaryOp::Add } else { BinaryOp::Sub };
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        while let Some(c) = self.eat_op(&['*', '/']) {
            let rhs = self.unary()?;
            let op = if c == '*' { BinaryOp::Mul } else { BinaryOp::Div };
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node> {
        if self.eat_op(&['-']).is_some() {
            return Ok(Node::Unary(UnaryOp::Neg, Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.primary()?;
        if self.eat_op(&['^']).is_some() {
            let exp = self.unary()?;
            return Ok(Node::Binary(BinaryOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Node> {
        let offset = self.offset();
        let Some(tok) = self.tokens.get(self.pos).cloned() else {
            return Err(Error::Syntax {
                offset,
                message: "unexpected end of input".into(),
            });
        };
        self.pos += 1;
        match tok.kind {
            TokenKind::Number(v) => Ok(Node::Const(v)),
            TokenKind::LParen => {
                let inner = self.sum()?;
                self.expect(TokenKind::RParen)?;
                Ok(inner)
            }
            TokenKind::Ident(name) => self.identifier(name, offset),
            other => Err(Error::Syntax {
                offset,
                message: format!("unexpected {}", other.describe()),
            }),
        }
    }

    fn identifier(&mut self, name: String, offset: usize) -> Result<Node> {
        if name == "pi" {
            return Ok(Node::Const(PI));
        }
        if let Some(func) = Func::lookup(&name) {
            self.expect(TokenKind::LParen)?;
            let mut args = vec![self.sum()?];
            while self.peek() == Some(&TokenKind::Comma) {
                self.pos += 1;
                args.push(self.sum()?);
            }
            self.expect(TokenKind::RParen)?;
            if args.len() != func.arity() {
                return Err(Error::Arity {
                    name,
                    expected: func.arity(),
                    got: args.len(),
                });
            }
            return Ok(Node::Call(func, args));
        }
        if let Some(digits) = name.strip_prefix('x') {
            if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                let index: usize = digits.parse().map_err(|_| Error::UnknownIdentifier {
                    name: name.clone(),
                    offset,
                })?;
                if index == 0 || index > self.dim {
                    return Err(Error::VariableOutOfRange {
                        index,
                        dim: self.dim,
                    });
                }
                return Ok(Node::Var(index - 1));
            }
        }
        Err(Error::UnknownIdentifier { name, offset })
    }
}
