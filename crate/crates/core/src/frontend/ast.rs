//! Syntax tree for the supported OpenQASM 3.0 subset.
//!
//! Every statement and expression carries the [`Span`] of its first token.
//! `Display` renders a node back to source text that re-parses to a
//! structurally identical tree (modulo spans, see [`ProgramAst::strip_spans`]).

use std::fmt::{self, Write};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl Span {
    pub fn new(line: usize, col: usize) -> Self {
        Self { line, col }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProgramAst {
    pub version: (u32, u32),
    pub includes: Vec<String>,
    pub statements: Vec<Statement>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statement {
    pub kind: StatementKind,
    pub span: Span,
}

/// A register reference: `q` (whole register) or `q[expr]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegRef {
    pub name: String,
    pub index: Option<Expr>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Modifier {
    Ctrl,
    NegCtrl,
    Inv,
    Pow(Expr),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateCall {
    /// Source order, outermost first.
    pub modifiers: Vec<Modifier>,
    pub name: String,
    pub args: Vec<Expr>,
    pub qubits: Vec<RegRef>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Range {
    pub start: Expr,
    pub step: Option<Expr>,
    pub stop: Expr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstType {
    Int,
    Float,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StatementKind {
    QubitDecl { name: String, size: Option<u64> },
    BitDecl { name: String, size: Option<u64> },
    /// `count` is `None` for a scalar `input float[W]`.
    InputDecl { name: String, width: u32, count: Option<u64> },
    ConstDecl { name: String, ty: ConstType, value: Expr },
    GateDef { name: String, params: Vec<String>, qubits: Vec<String>, body: Vec<Statement> },
    GateCall(GateCall),
    MeasureAssign { target: RegRef, source: RegRef },
    Reset(RegRef),
    Barrier(Vec<RegRef>),
    If { condition: Expr, then_body: Vec<Statement>, else_body: Vec<Statement> },
    For { var: String, range: Range, body: Vec<Statement> },
}

impl StatementKind {
    /// Element count a declaration introduces (1 for scalars).
    pub fn declared_size(&self) -> Option<u64> {
        match self {
            StatementKind::QubitDecl { size, .. } | StatementKind::BitDecl { size, .. } => {
                Some(size.unwrap_or(1))
            }
            StatementKind::InputDecl { count, .. } => Some(count.unwrap_or(1)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinaryOp::Add | BinaryOp::Sub => 1,
            BinaryOp::Mul | BinaryOp::Div => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum CompareOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CompareOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Eq => "==",
            CompareOp::Ne => "!=",
            CompareOp::Lt => "<",
            CompareOp::Le => "<=",
            CompareOp::Gt => ">",
            CompareOp::Ge => ">=",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        Some(match s {
            "==" => CompareOp::Eq,
            "!=" => CompareOp::Ne,
            "<" => CompareOp::Lt,
            "<=" => CompareOp::Le,
            ">" => CompareOp::Gt,
            ">=" => CompareOp::Ge,
            _ => return None,
        })
    }

    pub fn holds(self, lhs: u64, rhs: u64) -> bool {
        match self {
            CompareOp::Eq => lhs == rhs,
            CompareOp::Ne => lhs != rhs,
            CompareOp::Lt => lhs < rhs,
            CompareOp::Le => lhs <= rhs,
            CompareOp::Gt => lhs > rhs,
            CompareOp::Ge => lhs >= rhs,
        }
    }

    /// The comparator whose truth value is always the opposite.
    pub fn negated(self) -> Self {
        match self {
            CompareOp::Eq => CompareOp::Ne,
            CompareOp::Ne => CompareOp::Eq,
            CompareOp::Lt => CompareOp::Ge,
            CompareOp::Le => CompareOp::Gt,
            CompareOp::Gt => CompareOp::Le,
            CompareOp::Ge => CompareOp::Lt,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    IntLit(u64),
    FloatLit(f64),
    Pi,
    NamedRef { name: String, index: Option<Box<Expr>> },
    Neg(Box<Expr>),
    Binary { op: BinaryOp, lhs: Box<Expr>, rhs: Box<Expr> },
    Comparison { op: CompareOp, lhs: Box<Expr>, rhs: Box<Expr> },
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Self { kind, span }
    }

    fn precedence(&self) -> u8 {
        match &self.kind {
            ExprKind::Comparison { .. } => 0,
            ExprKind::Binary { op, .. } => op.precedence(),
            ExprKind::Neg(_) => 3,
            _ => 4,
        }
    }

    fn strip_spans(&mut self) {
        self.span = Span::default();
        match &mut self.kind {
            ExprKind::NamedRef { index: Some(i), .. } | ExprKind::Neg(i) => i.strip_spans(),
            ExprKind::Binary { lhs, rhs, .. } | ExprKind::Comparison { lhs, rhs, .. } => {
                lhs.strip_spans();
                rhs.strip_spans();
            }
            _ => {}
        }
    }
}

impl RegRef {
    fn strip_spans(&mut self) {
        self.span = Span::default();
        if let Some(i) = &mut self.index {
            i.strip_spans();
        }
    }
}

impl Statement {
    fn strip_spans(&mut self) {
        self.span = Span::default();
        match &mut self.kind {
            StatementKind::ConstDecl { value, .. } => value.strip_spans(),
            StatementKind::GateDef { body, .. } => body.iter_mut().for_each(Statement::strip_spans),
            StatementKind::GateCall(call) => {
                for m in &mut call.modifiers {
                    if let Modifier::Pow(e) = m {
                        e.strip_spans();
                    }
                }
                call.args.iter_mut().for_each(Expr::strip_spans);
                call.qubits.iter_mut().for_each(RegRef::strip_spans);
            }
            StatementKind::MeasureAssign { target, source } => {
                target.strip_spans();
                source.strip_spans();
            }
            StatementKind::Reset(r) => r.strip_spans(),
            StatementKind::Barrier(rs) => rs.iter_mut().for_each(RegRef::strip_spans),
            StatementKind::If { condition, then_body, else_body } => {
                condition.strip_spans();
                then_body.iter_mut().for_each(Statement::strip_spans);
                else_body.iter_mut().for_each(Statement::strip_spans);
            }
            StatementKind::For { range, body, .. } => {
                range.start.strip_spans();
                if let Some(s) = &mut range.step {
                    s.strip_spans();
                }
                range.stop.strip_spans();
                body.iter_mut().for_each(Statement::strip_spans);
            }
            StatementKind::QubitDecl { .. }
            | StatementKind::BitDecl { .. }
            | StatementKind::InputDecl { .. } => {}
        }
    }
}

impl ProgramAst {
    /// Copy with every span reset, for structural comparison.
    pub fn strip_spans(&self) -> ProgramAst {
        let mut out = self.clone();
        out.statements.iter_mut().for_each(Statement::strip_spans);
        out
    }
}

fn fmt_float(v: f64) -> String {
    // Debug gives the shortest string that round-trips, always with `.` or `e`.
    let s = format!("{v:?}");
    if s.contains(['.', 'e', 'E']) || !v.is_finite() {
        s
    } else {
        format!("{s}.0")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, e: &Expr, min: u8| {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match &self.kind {
            ExprKind::IntLit(v) => write!(f, "{v}"),
            ExprKind::FloatLit(v) => f.write_str(&fmt_float(*v)),
            ExprKind::Pi => f.write_str("pi"),
            ExprKind::NamedRef { name, index: None } => f.write_str(name),
            ExprKind::NamedRef { name, index: Some(i) } => write!(f, "{name}[{i}]"),
            ExprKind::Neg(inner) => {
                f.write_str("-")?;
                wrap(f, inner, 4)
            }
            ExprKind::Binary { op, lhs, rhs } => {
                let p = op.precedence();
                wrap(f, lhs, p)?;
                write!(f, " {} ", op.symbol())?;
                // Left-associative: the right operand needs strictly higher precedence.
                wrap(f, rhs, p + 1)
            }
            ExprKind::Comparison { op, lhs, rhs } => {
                wrap(f, lhs, 1)?;
                write!(f, " {} ", op.symbol())?;
                wrap(f, rhs, 1)
            }
        }
    }
}

impl fmt::Display for RegRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.index {
            Some(i) => write!(f, "{}[{i}]", self.name),
            None => f.write_str(&self.name),
        }
    }
}

impl fmt::Display for Modifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modifier::Ctrl => f.write_str("ctrl"),
            Modifier::NegCtrl => f.write_str("negctrl"),
            Modifier::Inv => f.write_str("inv"),
            Modifier::Pow(e) => write!(f, "pow({e})"),
        }
    }
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for GateCall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.modifiers {
            write!(f, "{m} @ ")?;
        }
        f.write_str(&self.name)?;
        if !self.args.is_empty() {
            write!(f, "({})", join(&self.args))?;
        }
        write!(f, " {};", join(&self.qubits))
    }
}

fn write_block(out: &mut String, body: &[Statement], depth: usize) -> fmt::Result {
    out.push_str("{\n");
    for s in body {
        write_statement(out, s, depth + 1)?;
    }
    write!(out, "{}}}", "  ".repeat(depth))
}

fn write_statement(out: &mut String, stmt: &Statement, depth: usize) -> fmt::Result {
    let pad = "  ".repeat(depth);
    out.push_str(&pad);
    let sized = |size: &Option<u64>| size.map(|n| format!("[{n}]")).unwrap_or_default();
    match &stmt.kind {
        StatementKind::QubitDecl { name, size } => write!(out, "qubit{} {name};", sized(size))?,
        StatementKind::BitDecl { name, size } => write!(out, "bit{} {name};", sized(size))?,
        StatementKind::InputDecl { name, width, count: None } => {
            write!(out, "input float[{width}] {name};")?
        }
        StatementKind::InputDecl { name, width, count: Some(n) } => {
            write!(out, "input array[float[{width}], {n}] {name};")?
        }
        StatementKind::ConstDecl { name, ty, value } => {
            let ty = match ty {
                ConstType::Int => "int",
                ConstType::Float => "float",
            };
            write!(out, "const {ty} {name} = {value};")?
        }
        StatementKind::GateDef { name, params, qubits, body } => {
            write!(out, "gate {name}")?;
            if !params.is_empty() {
                write!(out, "({})", params.join(", "))?;
            }
            write!(out, " {} ", qubits.join(", "))?;
            write_block(out, body, depth)?;
        }
        StatementKind::GateCall(call) => write!(out, "{call}")?,
        StatementKind::MeasureAssign { target, source } => {
            write!(out, "{target} = measure {source};")?
        }
        StatementKind::Reset(r) => write!(out, "reset {r};")?,
        StatementKind::Barrier(rs) => write!(out, "barrier {};", join(rs))?,
        StatementKind::If { condition, then_body, else_body } => {
            write!(out, "if ({condition}) ")?;
            write_block(out, then_body, depth)?;
            if !else_body.is_empty() {
                out.push_str(" else ");
                write_block(out, else_body, depth)?;
            }
        }
        StatementKind::For { var, range, body } => {
            write!(out, "for int {var} in [{}:", range.start)?;
            if let Some(step) = &range.step {
                write!(out, "{step}:")?;
            }
            write!(out, "{}] ", range.stop)?;
            write_block(out, body, depth)?;
        }
    }
    out.push('\n');
    Ok(())
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        write_statement(&mut out, self, 0)?;
        f.write_str(out.trim_end())
    }
}

impl fmt::Display for ProgramAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        writeln!(out, "OPENQASM {}.{};", self.version.0, self.version.1)?;
        for inc in &self.includes {
            writeln!(out, "include \"{inc}\";")?;
        }
        for s in &self.statements {
            write_statement(&mut out, s, 0)?;
        }
        f.write_str(&out)
    }
}
