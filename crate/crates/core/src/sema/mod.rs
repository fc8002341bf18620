//! Name resolution, classification, constant folding, loop unrolling and
//! gate inlining.
//!
//! The output [`ValidatedProgram`] contains only standard-library gate calls
//! (modifiers still attached), measurements, resets, barriers and
//! conditionals, all with resolved qubit ids and bit locations.

mod analyze;
mod eval;
pub mod symbols;

use thiserror::Error;

pub use analyze::analyze;
pub use eval::const_eval;
pub use symbols::{ConstValue, SymbolEntry, SymbolKind, SymbolTable};

use crate::frontend::ast::Span;
use crate::kir::{Angle, BitLoc, ParamDecl, Predicate, RegisterDecl, StdGate};

/// Upper bound on the number of statements after unrolling and inlining.
pub const MAX_STATEMENTS: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SemaError {
    #[error("{span}: undefined name `{name}`")]
    UndefinedName { name: String, span: Span },
    #[error("{span}: `{name}` is already defined{}", previous_text(previous))]
    Redefinition { name: String, span: Span, previous: Option<Span> },
    #[error("{span}: {what}: expected {expected}, found {found}")]
    ArityMismatch { what: String, expected: usize, found: usize, span: Span },
    #[error("{span}: index {index} out of range for `{name}` of size {size}")]
    IndexOutOfRange { name: String, index: i64, size: usize, span: Span },
    #[error("{span}: loop bound is not a compile-time integer: {reason}")]
    NonConstLoopBound { reason: String, span: Span },
    #[error("{span}: loop step must be non-zero")]
    ZeroLoopStep { span: Span },
    #[error("{span}: gate `{name}` refers to itself")]
    RecursiveGateDef { name: String, span: Span },
    #[error("{span}: qubit {qubit} is used more than once in one gate call")]
    DuplicateQubitArg { qubit: String, span: Span },
    #[error("{span}: `{name}` is not a compile-time constant")]
    NotConst { name: String, span: Span },
    #[error("{span}: division by zero in constant expression")]
    DivByZero { span: Span },
    #[error("{span}: integer overflow in constant expression")]
    IntegerOverflow { span: Span },
    #[error("{span}: {message}")]
    TypeMismatch { message: String, span: Span },
    #[error("{span}: parameter expression must be affine in a single input element")]
    UnsupportedParamExpr { span: Span },
    #[error("program expands to more than {limit} statements")]
    ProgramTooLarge { limit: usize },
}

fn previous_text(previous: &Option<Span>) -> String {
    match previous {
        Some(s) => format!(" (previous definition at {s})"),
        None => " as a standard gate".into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResolvedModifier {
    Ctrl,
    NegCtrl,
    Inv,
    /// Exponent as evaluated; lowering rejects non-integers.
    Pow(ConstValue),
}

/// A standard-library gate call with every operand resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedCall {
    /// Outermost first. Each `Ctrl`/`NegCtrl` consumes one leading qubit, in order.
    pub modifiers: Vec<ResolvedModifier>,
    pub gate: StdGate,
    pub angles: Vec<Angle>,
    pub qubits: Vec<usize>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum VStmt {
    Gate(ResolvedCall),
    Measure { qubit: usize, bit: BitLoc, span: Span },
    Reset { qubit: usize, span: Span },
    Barrier { qubits: Vec<usize> },
    If { predicate: Predicate, then_body: Vec<VStmt>, else_body: Vec<VStmt>, span: Span },
}

#[derive(Debug, Clone)]
pub struct ValidatedProgram {
    pub symbols: SymbolTable,
    pub statements: Vec<VStmt>,
    pub num_qubits: usize,
    /// Runtime inputs in declaration order; defines the flat parameter vector.
    pub param_layout: Vec<ParamDecl>,
    /// Bit registers in declaration order.
    pub classical_layout: Vec<RegisterDecl>,
}
