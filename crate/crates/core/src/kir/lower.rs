use std::cell::Cell;
use std::collections::HashSet;
use std::sync::atomic::{AtomicUsize, Ordering};

use thiserror::Error;

use super::ir::*;
use crate::frontend::ast::Span;
use crate::sema::{ResolvedCall, ResolvedModifier, VStmt, ValidatedProgram};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LowerError {
    #[error("{span}: {what}: expected {expected}, found {found}")]
    ArityMismatch { what: String, expected: usize, found: usize, span: Span },
    #[error("{span}: {message}")]
    Modifier { message: String, span: Span },
    #[error("{span}: conditional body measures into `{bit}`, which its own condition reads")]
    SelfReferencingCondition { bit: String, span: Span },
    #[error("{span}: condition reads `{subject}` before any measurement writes it")]
    ReadBeforeWrite { subject: String, span: Span },
}

static TOTAL_LOWERINGS: AtomicUsize = AtomicUsize::new(0);

thread_local! {
    static THREAD_LOWERINGS: Cell<usize> = const { Cell::new(0) };
}

/// Number of [`lower`] calls made on the current thread.
pub fn lower_count() -> usize {
    THREAD_LOWERINGS.with(Cell::get)
}

/// Number of [`lower`] calls made by the whole process.
pub fn total_lower_count() -> usize {
    TOTAL_LOWERINGS.load(Ordering::Relaxed)
}

/// Folds a call's modifiers into canonical gate ops.
///
/// Named controlled gates contribute their built-in controls after any
/// modifier controls. `pow(k)` expands to `k` copies (`|k|` adjoint copies for
/// negative `k`, none for zero).
pub fn canonicalize_modifiers(call: &ResolvedCall) -> Result<Vec<GateOp>, LowerError> {
    let (base, builtin_controls, daggered) = call.gate.canonical();
    let n_mod = call
        .modifiers
        .iter()
        .filter(|m| matches!(m, ResolvedModifier::Ctrl | ResolvedModifier::NegCtrl))
        .count();
    let expected = n_mod + builtin_controls + base.num_targets();
    if call.qubits.len() != expected {
        return Err(LowerError::ArityMismatch {
            what: format!("qubit operands of `{}`", base),
            expected,
            found: call.qubits.len(),
            span: call.span,
        });
    }
    if call.angles.len() != base.num_angles() {
        return Err(LowerError::ArityMismatch {
            what: format!("angles of `{}`", base),
            expected: base.num_angles(),
            found: call.angles.len(),
            span: call.span,
        });
    }

    let split = n_mod + builtin_controls;
    let op = GateOp {
        base,
        angles: call.angles.clone(),
        targets: call.qubits[split..].to_vec(),
        controls: call.qubits[n_mod..split].iter().map(|&q| Control::pos(q)).collect(),
        adjoint: false,
    };
    let op = if daggered { op.adjoint() } else { op };
    let mut ops = vec![op];

    let mut next_control = n_mod;
    for m in call.modifiers.iter().rev() {
        match m {
            ResolvedModifier::Ctrl | ResolvedModifier::NegCtrl => {
                next_control -= 1;
                let q = call.qubits[next_control];
                let c = if *m == ResolvedModifier::Ctrl { Control::pos(q) } else { Control::neg(q) };
                for op in &mut ops {
                    op.controls.insert(0, c);
                }
            }
            ResolvedModifier::Inv => ops = invert(&ops),
            ResolvedModifier::Pow(k) => {
                let k = k.as_int().ok_or_else(|| LowerError::Modifier {
                    message: format!("pow exponent must be a constant integer, found {k}"),
                    span: call.span,
                })?;
                if k < 0 {
                    ops = invert(&ops);
                }
                ops = std::iter::repeat_n(ops, k.unsigned_abs() as usize).flatten().collect();
            }
        }
    }
    Ok(ops)
}

fn invert(ops: &[GateOp]) -> Vec<GateOp> {
    ops.iter().rev().map(GateOp::adjoint).collect()
}

/// Lowers a validated program to a kernel. Conditionals become nested
/// [`CondBlock`]s holding each branch once.
pub fn lower(vp: &ValidatedProgram) -> Result<Kernel, LowerError> {
    THREAD_LOWERINGS.with(|c| c.set(c.get() + 1));
    TOTAL_LOWERINGS.fetch_add(1, Ordering::Relaxed);

    let mut lowerer = Lowerer { vp, written: HashSet::new() };
    let body = lowerer.block(&vp.statements)?;
    Ok(Kernel {
        num_qubits: vp.num_qubits,
        param_layout: vp.param_layout.clone(),
        classical_layout: vp.classical_layout.clone(),
        body,
    })
}

struct Lowerer<'a> {
    vp: &'a ValidatedProgram,
    /// Bits written on at least one path so far.
    written: HashSet<BitLoc>,
}

fn measured_bits(ops: &[KOp], out: &mut Vec<BitLoc>) {
    for op in ops {
        match op {
            KOp::Measure { bit, .. } => out.push(*bit),
            KOp::Cond(c) => {
                measured_bits(&c.then_ops, out);
                measured_bits(&c.else_ops, out);
            }
            _ => {}
        }
    }
}

impl Lowerer<'_> {
    fn bit_name(&self, bit: BitLoc) -> String {
        format!("{}[{}]", self.vp.classical_layout[bit.register].name, bit.index)
    }

    fn block(&mut self, stmts: &[VStmt]) -> Result<Vec<KOp>, LowerError> {
        let mut ops = Vec::with_capacity(stmts.len());
        for s in stmts {
            match s {
                VStmt::Gate(call) => ops.extend(canonicalize_modifiers(call)?.into_iter().map(KOp::Gate)),
                VStmt::Measure { qubit, bit, .. } => {
                    self.written.insert(*bit);
                    ops.push(KOp::Measure { qubit: *qubit, bit: *bit });
                }
                VStmt::Reset { qubit, .. } => ops.push(KOp::Reset { qubit: *qubit }),
                VStmt::Barrier { .. } => ops.push(KOp::Nop),
                VStmt::If { predicate, then_body, else_body, span } => {
                    self.check_readable(predicate, *span)?;
                    let then_ops = self.block(then_body)?;
                    let else_ops = self.block(else_body)?;
                    let mut writes = Vec::new();
                    measured_bits(&then_ops, &mut writes);
                    measured_bits(&else_ops, &mut writes);
                    if let Some(bit) = writes.into_iter().find(|b| predicate.reads(*b)) {
                        return Err(LowerError::SelfReferencingCondition { bit: self.bit_name(bit), span: *span });
                    }
                    ops.push(KOp::Cond(CondBlock { predicate: *predicate, then_ops, else_ops }));
                }
            }
        }
        Ok(ops)
    }

    fn check_readable(&self, p: &Predicate, span: Span) -> Result<(), LowerError> {
        let (ok, subject) = match p.subject {
            PredicateSubject::Bit(b) => (self.written.contains(&b), self.bit_name(b)),
            PredicateSubject::Register(r) => (
                self.written.iter().any(|b| b.register == r),
                self.vp.classical_layout[r].name.clone(),
            ),
        };
        if ok {
            Ok(())
        } else {
            Err(LowerError::ReadBeforeWrite { subject, span })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BindError {
    #[error("kernel takes {expected} parameter values, got {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("parameter `{name}` takes {expected} values, got {found}")]
    ParameterLength { name: String, expected: usize, found: usize },
    #[error("parameter `{0}` given more than once")]
    DuplicateParameter(String),
}

/// A kernel paired with concrete runtime parameter values. Borrowing the
/// kernel means binding never copies or re-lowers the body.
#[derive(Debug, Clone)]
pub struct BoundKernel<'k> {
    pub kernel: &'k Kernel,
    pub params: Vec<f64>,
}

impl<'k> BoundKernel<'k> {
    pub fn angle(&self, a: Angle) -> f64 {
        a.value(&self.params)
    }
}

pub fn bind(kernel: &Kernel, values: Vec<f64>) -> Result<BoundKernel<'_>, BindError> {
    let expected = kernel.num_params();
    if values.len() != expected {
        return Err(BindError::ArityMismatch { expected, found: values.len() });
    }
    Ok(BoundKernel { kernel, params: values })
}

/// Binds by input name. Every declared input must be supplied exactly once.
pub fn bind_named<'k>(kernel: &'k Kernel, named: &[(String, Vec<f64>)]) -> Result<BoundKernel<'k>, BindError> {
    let mut seen = HashSet::new();
    for (name, _) in named {
        if !kernel.param_layout.iter().any(|p| &p.name == name) {
            return Err(BindError::UnknownParameter(name.clone()));
        }
        if !seen.insert(name) {
            return Err(BindError::DuplicateParameter(name.clone()));
        }
    }
    let mut values = Vec::with_capacity(kernel.num_params());
    for decl in &kernel.param_layout {
        let given = named.iter().find(|(n, _)| n == &decl.name).map(|(_, v)| v.as_slice()).unwrap_or(&[]);
        if given.len() != decl.len {
            return Err(BindError::ParameterLength { name: decl.name.clone(), expected: decl.len, found: given.len() });
        }
        values.extend_from_slice(given);
    }
    bind(kernel, values)
}
