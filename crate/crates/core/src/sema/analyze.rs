use std::collections::{HashMap, HashSet};

use super::eval::{const_eval_in, eval_angle, GateEnv};
use super::symbols::{ConstValue, SymbolEntry, SymbolKind, SymbolTable};
use super::{ResolvedCall, ResolvedModifier, SemaError, VStmt, ValidatedProgram, MAX_STATEMENTS};
use crate::frontend::ast::*;
use crate::kir::{Angle, BitLoc, Comparator, ParamDecl, Predicate, PredicateSubject, RegisterDecl, StdGate};

type SResult<T> = Result<T, SemaError>;

struct GateDefinition {
    params: Vec<String>,
    qubits: Vec<String>,
    body: Vec<(GateCall, Span)>,
}

struct Analyzer {
    symbols: SymbolTable,
    gates: HashMap<String, GateDefinition>,
    stdgates: bool,
    num_qubits: usize,
    num_params: usize,
    param_layout: Vec<ParamDecl>,
    classical_layout: Vec<RegisterDecl>,
    emitted: usize,
}

/// Resolves and validates a parsed program.
pub fn analyze(ast: &ProgramAst) -> SResult<ValidatedProgram> {
    let mut a = Analyzer {
        symbols: SymbolTable::new(),
        gates: HashMap::new(),
        stdgates: ast.includes.iter().any(|i| i == "stdgates.inc"),
        num_qubits: 0,
        num_params: 0,
        param_layout: Vec::new(),
        classical_layout: Vec::new(),
        emitted: 0,
    };
    let mut statements = Vec::new();
    for stmt in &ast.statements {
        a.statement(stmt, &mut statements)?;
    }
    Ok(ValidatedProgram {
        symbols: a.symbols,
        statements,
        num_qubits: a.num_qubits,
        param_layout: a.param_layout,
        classical_layout: a.classical_layout,
    })
}

fn too_large() -> SemaError {
    SemaError::ProgramTooLarge { limit: MAX_STATEMENTS }
}

/// Expands whole-register operands element-wise; indexed operands repeat.
fn broadcast<T: Copy>(operands: &[(Vec<T>, bool)], what: &str, span: Span) -> SResult<Vec<Vec<T>>> {
    let mut len = None;
    for (ids, whole) in operands {
        if *whole {
            match len {
                None => len = Some(ids.len()),
                Some(l) if l != ids.len() => {
                    return Err(SemaError::ArityMismatch {
                        what: format!("register sizes in broadcast {what}"),
                        expected: l,
                        found: ids.len(),
                        span,
                    })
                }
                _ => {}
            }
        }
    }
    let len = len.unwrap_or(1);
    Ok((0..len)
        .map(|i| operands.iter().map(|(ids, whole)| if *whole { ids[i] } else { ids[0] }).collect())
        .collect())
}

fn check_distinct(qubits: &[usize], span: Span) -> SResult<()> {
    let mut seen = HashSet::new();
    for q in qubits {
        if !seen.insert(q) {
            return Err(SemaError::DuplicateQubitArg { qubit: format!("q{q}"), span });
        }
    }
    Ok(())
}

fn count_controls(mods: &[ResolvedModifier]) -> usize {
    mods.iter().filter(|m| matches!(m, ResolvedModifier::Ctrl | ResolvedModifier::NegCtrl)).count()
}

impl Analyzer {
    fn push(&mut self, out: &mut Vec<VStmt>, stmt: VStmt) -> SResult<()> {
        self.emitted += 1;
        if self.emitted > MAX_STATEMENTS {
            return Err(too_large());
        }
        out.push(stmt);
        Ok(())
    }

    fn declare(&mut self, entry: SymbolEntry) -> SResult<()> {
        if StdGate::lookup(&entry.name, self.stdgates).is_some() {
            return Err(SemaError::Redefinition {
                name: entry.name.clone(),
                span: entry.decl_span,
                previous: None,
            });
        }
        let (name, span) = (entry.name.clone(), entry.decl_span);
        self.symbols
            .insert(entry)
            .map_err(|prev| SemaError::Redefinition { name, span, previous: Some(prev.decl_span) })
    }

    fn entry(name: &str, kind: SymbolKind, size: usize, span: Span) -> SymbolEntry {
        SymbolEntry {
            name: name.to_string(),
            kind,
            size,
            const_value: None,
            decl_span: span,
            offset: 0,
            indexed: false,
        }
    }

    fn statement(&mut self, stmt: &Statement, out: &mut Vec<VStmt>) -> SResult<()> {
        let span = stmt.span;
        match &stmt.kind {
            StatementKind::QubitDecl { name, size } => {
                let n = size.unwrap_or(1) as usize;
                let mut e = Self::entry(name, SymbolKind::QubitRegister, n, span);
                e.offset = self.num_qubits;
                e.indexed = size.is_some();
                self.declare(e)?;
                self.num_qubits += n;
            }
            StatementKind::BitDecl { name, size } => {
                let n = size.unwrap_or(1) as usize;
                let mut e = Self::entry(name, SymbolKind::ClassicalRegister, n, span);
                e.offset = self.classical_layout.len();
                e.indexed = size.is_some();
                self.declare(e)?;
                self.classical_layout.push(RegisterDecl { name: name.clone(), width: n });
            }
            StatementKind::InputDecl { name, count, .. } => {
                let n = count.unwrap_or(1) as usize;
                let mut e = Self::entry(name, SymbolKind::RuntimeInput, n, span);
                e.offset = self.num_params;
                e.indexed = count.is_some();
                self.declare(e)?;
                self.num_params += n;
                self.param_layout.push(ParamDecl { name: name.clone(), len: n, is_array: count.is_some() });
            }
            StatementKind::ConstDecl { name, ty, value } => {
                let v = const_eval_in(value, &self.symbols, None)?;
                let v = match (ty, v) {
                    (ConstType::Int, ConstValue::Float(_)) => {
                        return Err(SemaError::TypeMismatch {
                            message: format!("`const int {name}` initialized with a float value"),
                            span: value.span,
                        })
                    }
                    (ConstType::Float, v) => ConstValue::Float(v.as_f64()),
                    (ConstType::Int, v) => v,
                };
                let mut e = Self::entry(name, SymbolKind::CompileTimeConst, 1, span);
                e.const_value = Some(v);
                self.declare(e)?;
            }
            StatementKind::GateDef { name, params, qubits, body } => {
                self.gate_def(name, params, qubits, body, span)?;
            }
            StatementKind::GateCall(call) => self.gate_call(call, span, out)?,
            StatementKind::MeasureAssign { target, source } => {
                let bits = self.bit_operand(target)?;
                let qubits = self.qubit_operand(source)?;
                if bits.0.len() != qubits.0.len() {
                    return Err(SemaError::ArityMismatch {
                        what: "measured qubits vs. target bits".into(),
                        expected: qubits.0.len(),
                        found: bits.0.len(),
                        span,
                    });
                }
                for (&qubit, &bit) in qubits.0.iter().zip(&bits.0) {
                    self.push(out, VStmt::Measure { qubit, bit, span })?;
                }
            }
            StatementKind::Reset(r) => {
                for qubit in self.qubit_operand(r)?.0 {
                    self.push(out, VStmt::Reset { qubit, span })?;
                }
            }
            StatementKind::Barrier(refs) => {
                let mut qubits = Vec::new();
                for r in refs {
                    qubits.extend(self.qubit_operand(r)?.0);
                }
                self.push(out, VStmt::Barrier { qubits })?;
            }
            StatementKind::If { condition, then_body, else_body } => {
                let predicate = self.predicate(condition)?;
                let then_body = self.block(then_body)?;
                let else_body = self.block(else_body)?;
                self.push(out, VStmt::If { predicate, then_body, else_body, span })?;
            }
            StatementKind::For { var, range, body } => self.for_loop(var, range, body, span, out)?,
        }
        Ok(())
    }

    fn block(&mut self, body: &[Statement]) -> SResult<Vec<VStmt>> {
        let mut out = Vec::new();
        for s in body {
            self.statement(s, &mut out)?;
        }
        Ok(out)
    }

    fn loop_bound(&self, e: &Expr) -> SResult<i64> {
        match const_eval_in(e, &self.symbols, None) {
            Ok(ConstValue::Int(v)) => Ok(v),
            Ok(ConstValue::Float(v)) => Err(SemaError::NonConstLoopBound {
                reason: format!("{v:?} is not an integer"),
                span: e.span,
            }),
            Err(SemaError::NotConst { name, .. }) => Err(SemaError::NonConstLoopBound {
                reason: format!("`{name}` is not a compile-time constant"),
                span: e.span,
            }),
            Err(other) => Err(other),
        }
    }

    fn for_loop(&mut self, var: &str, range: &Range, body: &[Statement], span: Span, out: &mut Vec<VStmt>) -> SResult<()> {
        let start = self.loop_bound(&range.start)?;
        let stop = self.loop_bound(&range.stop)?;
        let step = match &range.step {
            Some(s) => self.loop_bound(s)?,
            None => 1,
        };
        if step == 0 {
            return Err(SemaError::ZeroLoopStep { span: range.step.as_ref().map_or(span, |s| s.span) });
        }
        let iterations = if (step > 0 && start > stop) || (step < 0 && start < stop) {
            0
        } else {
            (stop.abs_diff(start) / step.unsigned_abs()) as usize + 1
        };
        if iterations > MAX_STATEMENTS {
            return Err(too_large());
        }
        let mut e = Self::entry(var, SymbolKind::CompileTimeConst, 1, span);
        e.const_value = Some(ConstValue::Int(start));
        self.symbols.push_scope();
        self.symbols.insert(e).expect("fresh scope");
        let result = (0..iterations).try_for_each(|k| {
            let value = start + step * k as i64;
            self.symbols.update_const(var, ConstValue::Int(value));
            body.iter().try_for_each(|s| self.statement(s, out))
        });
        self.symbols.pop_scope();
        result
    }

    fn index_of(&self, entry: &SymbolEntry, index: &Expr, env: Option<&GateEnv>) -> SResult<usize> {
        let i = const_eval_in(index, &self.symbols, env)?.as_int().ok_or_else(|| SemaError::TypeMismatch {
            message: "index must be an integer".into(),
            span: index.span,
        })?;
        if i < 0 || i as usize >= entry.size {
            return Err(SemaError::IndexOutOfRange {
                name: entry.name.clone(),
                index: i,
                size: entry.size,
                span: index.span,
            });
        }
        Ok(i as usize)
    }

    fn lookup_kind(&self, r: &RegRef, kind: SymbolKind, what: &str) -> SResult<&SymbolEntry> {
        let entry = self
            .symbols
            .lookup(&r.name)
            .ok_or_else(|| SemaError::UndefinedName { name: r.name.clone(), span: r.span })?;
        if entry.kind != kind {
            return Err(SemaError::TypeMismatch { message: format!("`{}` is not a {what}", r.name), span: r.span });
        }
        if r.index.is_some() && !entry.indexed {
            return Err(SemaError::TypeMismatch {
                message: format!("`{}` is a single {what} and cannot be indexed", r.name),
                span: r.span,
            });
        }
        Ok(entry)
    }

    /// Qubit ids named by `r`, and whether it is a whole-register reference.
    fn qubit_operand(&self, r: &RegRef) -> SResult<(Vec<usize>, bool)> {
        let entry = self.lookup_kind(r, SymbolKind::QubitRegister, "qubit register")?;
        match &r.index {
            Some(i) => Ok((vec![entry.offset + self.index_of(entry, i, None)?], false)),
            None => Ok(((entry.offset..entry.offset + entry.size).collect(), entry.indexed)),
        }
    }

    fn bit_operand(&self, r: &RegRef) -> SResult<(Vec<BitLoc>, bool)> {
        let entry = self.lookup_kind(r, SymbolKind::ClassicalRegister, "bit register")?;
        let register = entry.offset;
        match &r.index {
            Some(i) => Ok((vec![BitLoc { register, index: self.index_of(entry, i, None)? }], false)),
            None => Ok(((0..entry.size).map(|index| BitLoc { register, index }).collect(), entry.indexed)),
        }
    }

    fn predicate(&self, cond: &Expr) -> SResult<Predicate> {
        let (subject_expr, comparator, rhs) = match &cond.kind {
            ExprKind::Comparison { op, lhs, rhs } => (lhs.as_ref(), Comparator::Cmp(*op), Some(rhs.as_ref())),
            _ => (cond, Comparator::Truthy, None),
        };
        let ExprKind::NamedRef { name, index } = &subject_expr.kind else {
            return Err(SemaError::TypeMismatch {
                message: "condition must test a bit or bit register".into(),
                span: subject_expr.span,
            });
        };
        let r = RegRef { name: name.clone(), index: index.as_deref().cloned(), span: subject_expr.span };
        let entry = self.lookup_kind(&r, SymbolKind::ClassicalRegister, "bit register")?;
        let (subject, width) = match &r.index {
            Some(i) => (
                PredicateSubject::Bit(BitLoc { register: entry.offset, index: self.index_of(entry, i, None)? }),
                1,
            ),
            None => (PredicateSubject::Register(entry.offset), entry.size),
        };
        if width > 64 {
            return Err(SemaError::TypeMismatch {
                message: format!("register `{name}` is too wide ({width} bits) to compare as an integer"),
                span: r.span,
            });
        }
        let rhs = match rhs {
            None => 0,
            Some(e) => {
                let v = const_eval_in(e, &self.symbols, None)?.as_int().ok_or_else(|| SemaError::TypeMismatch {
                    message: "condition must compare against an integer".into(),
                    span: e.span,
                })?;
                let fits = v >= 0 && (width == 64 || (v as u64) < (1u64 << width));
                if !fits {
                    return Err(SemaError::TypeMismatch {
                        message: format!("{v} does not fit in the {width}-bit value being compared"),
                        span: e.span,
                    });
                }
                v as u64
            }
        };
        Ok(Predicate { subject, comparator, rhs })
    }

    fn resolve_modifiers(&self, mods: &[Modifier], env: Option<&GateEnv>) -> SResult<Vec<ResolvedModifier>> {
        mods.iter()
            .map(|m| {
                Ok(match m {
                    Modifier::Ctrl => ResolvedModifier::Ctrl,
                    Modifier::NegCtrl => ResolvedModifier::NegCtrl,
                    Modifier::Inv => ResolvedModifier::Inv,
                    Modifier::Pow(e) => ResolvedModifier::Pow(const_eval_in(e, &self.symbols, env)?),
                })
            })
            .collect()
    }

    fn gate_call(&mut self, call: &GateCall, span: Span, out: &mut Vec<VStmt>) -> SResult<()> {
        let mods = self.resolve_modifiers(&call.modifiers, None)?;
        let angles = call
            .args
            .iter()
            .map(|a| eval_angle(a, &self.symbols, None))
            .collect::<SResult<Vec<_>>>()?;
        let operands = call.qubits.iter().map(|r| self.qubit_operand(r)).collect::<SResult<Vec<_>>>()?;
        for qubits in broadcast(&operands, &format!("call to `{}`", call.name), span)? {
            for resolved in self.expand(&call.name, &mods, angles.clone(), qubits, span)? {
                self.push(out, VStmt::Gate(resolved))?;
            }
        }
        Ok(())
    }

    fn undefined_gate(&self, name: &str, span: Span) -> SemaError {
        match self.symbols.lookup(name) {
            Some(_) => SemaError::TypeMismatch { message: format!("`{name}` is not a gate"), span },
            None => SemaError::UndefinedName { name: name.to_string(), span },
        }
    }

    /// Inlines user gates down to standard-library calls. Modifiers on a
    /// user gate distribute over its body: `inv` reverses it, `pow(k)`
    /// repeats it, and each control is prepended to every inner call.
    fn expand(
        &self,
        name: &str,
        mods: &[ResolvedModifier],
        angles: Vec<Angle>,
        qubits: Vec<usize>,
        span: Span,
    ) -> SResult<Vec<ResolvedCall>> {
        check_distinct(&qubits, span)?;
        let n_ctrl = count_controls(mods);

        if let Some(def) = self.gates.get(name) {
            if angles.len() != def.params.len() {
                return Err(SemaError::ArityMismatch {
                    what: format!("parameters of `{name}`"),
                    expected: def.params.len(),
                    found: angles.len(),
                    span,
                });
            }
            if qubits.len() != n_ctrl + def.qubits.len() {
                return Err(SemaError::ArityMismatch {
                    what: format!("qubit operands of `{name}`"),
                    expected: n_ctrl + def.qubits.len(),
                    found: qubits.len(),
                    span,
                });
            }
            let env = GateEnv {
                params: def.params.iter().cloned().zip(angles).collect(),
                qubits: def.qubits.iter().cloned().zip(qubits[n_ctrl..].iter().copied()).collect(),
            };
            let mut calls = Vec::new();
            for (inner, inner_span) in &def.body {
                let inner_mods = self.resolve_modifiers(&inner.modifiers, Some(&env))?;
                let inner_angles = inner
                    .args
                    .iter()
                    .map(|a| eval_angle(a, &self.symbols, Some(&env)))
                    .collect::<SResult<Vec<_>>>()?;
                let inner_qubits = inner.qubits.iter().map(|r| env.qubits[&r.name]).collect();
                calls.extend(self.expand(&inner.name, &inner_mods, inner_angles, inner_qubits, *inner_span)?);
            }
            return wrap_modifiers(calls, mods, &qubits[..n_ctrl], span);
        }

        let Some(gate) = StdGate::lookup(name, self.stdgates) else {
            return Err(self.undefined_gate(name, span));
        };
        if angles.len() != gate.num_angles() {
            return Err(SemaError::ArityMismatch {
                what: format!("parameters of `{name}`"),
                expected: gate.num_angles(),
                found: angles.len(),
                span,
            });
        }
        if qubits.len() != n_ctrl + gate.num_qubits() {
            return Err(SemaError::ArityMismatch {
                what: format!("qubit operands of `{name}`"),
                expected: n_ctrl + gate.num_qubits(),
                found: qubits.len(),
                span,
            });
        }
        Ok(vec![ResolvedCall { modifiers: mods.to_vec(), gate, angles, qubits, span }])
    }

    fn gate_def(&mut self, name: &str, params: &[String], qubits: &[String], body: &[Statement], span: Span) -> SResult<()> {
        let mut seen = HashSet::new();
        for n in params.iter().chain(qubits) {
            if !seen.insert(n) {
                return Err(SemaError::Redefinition { name: n.clone(), span, previous: Some(span) });
            }
        }
        let mut calls = Vec::new();
        for stmt in body {
            let StatementKind::GateCall(call) = &stmt.kind else {
                return Err(SemaError::TypeMismatch {
                    message: "gate bodies may only contain gate calls".into(),
                    span: stmt.span,
                });
            };
            let s = stmt.span;
            if call.name == name {
                return Err(SemaError::RecursiveGateDef { name: name.to_string(), span: s });
            }
            let (n_angles, n_qubits) = if let Some(def) = self.gates.get(&call.name) {
                (def.params.len(), def.qubits.len())
            } else if let Some(g) = StdGate::lookup(&call.name, self.stdgates) {
                (g.num_angles(), g.num_qubits())
            } else {
                return Err(self.undefined_gate(&call.name, s));
            };
            let n_ctrl = call.modifiers.iter().filter(|m| matches!(m, Modifier::Ctrl | Modifier::NegCtrl)).count();
            if call.args.len() != n_angles {
                return Err(SemaError::ArityMismatch {
                    what: format!("parameters of `{}`", call.name),
                    expected: n_angles,
                    found: call.args.len(),
                    span: s,
                });
            }
            if call.qubits.len() != n_ctrl + n_qubits {
                return Err(SemaError::ArityMismatch {
                    what: format!("qubit operands of `{}`", call.name),
                    expected: n_ctrl + n_qubits,
                    found: call.qubits.len(),
                    span: s,
                });
            }
            let mut used = HashSet::new();
            for r in &call.qubits {
                if r.index.is_some() {
                    return Err(SemaError::TypeMismatch {
                        message: format!("gate qubit argument `{}` cannot be indexed", r.name),
                        span: r.span,
                    });
                }
                if !qubits.contains(&r.name) {
                    return Err(SemaError::UndefinedName { name: r.name.clone(), span: r.span });
                }
                if !used.insert(&r.name) {
                    return Err(SemaError::DuplicateQubitArg { qubit: r.name.clone(), span: r.span });
                }
            }
            for e in call.args.iter().chain(call.modifiers.iter().filter_map(|m| match m {
                Modifier::Pow(e) => Some(e),
                _ => None,
            })) {
                self.check_gate_expr(e, params)?;
            }
            calls.push((call.clone(), s));
        }

        let mut entry = Self::entry(name, SymbolKind::GateDefinition, 1, span);
        entry.size = qubits.len();
        self.declare(entry)?;
        self.gates.insert(
            name.to_string(),
            GateDefinition { params: params.to_vec(), qubits: qubits.to_vec(), body: calls },
        );
        Ok(())
    }

    /// Gate bodies may reference their own parameters and global constants only.
    fn check_gate_expr(&self, e: &Expr, params: &[String]) -> SResult<()> {
        match &e.kind {
            ExprKind::NamedRef { name, index } => {
                if params.contains(name) {
                    if index.is_some() {
                        return Err(SemaError::TypeMismatch {
                            message: format!("gate parameter `{name}` cannot be indexed"),
                            span: e.span,
                        });
                    }
                    return Ok(());
                }
                match self.symbols.lookup(name) {
                    None => Err(SemaError::UndefinedName { name: name.clone(), span: e.span }),
                    Some(s) if s.kind == SymbolKind::CompileTimeConst => Ok(()),
                    Some(_) => Err(SemaError::TypeMismatch {
                        message: format!("gate bodies can only use parameters and constants, not `{name}`"),
                        span: e.span,
                    }),
                }
            }
            ExprKind::Neg(inner) => self.check_gate_expr(inner, params),
            ExprKind::Binary { lhs, rhs, .. } | ExprKind::Comparison { lhs, rhs, .. } => {
                self.check_gate_expr(lhs, params)?;
                self.check_gate_expr(rhs, params)
            }
            _ => Ok(()),
        }
    }
}

fn wrap_modifiers(
    mut calls: Vec<ResolvedCall>,
    mods: &[ResolvedModifier],
    controls: &[usize],
    span: Span,
) -> SResult<Vec<ResolvedCall>> {
    let mut next_control = controls.len();
    for m in mods.iter().rev() {
        match m {
            ResolvedModifier::Ctrl | ResolvedModifier::NegCtrl => {
                next_control -= 1;
                for c in &mut calls {
                    c.modifiers.insert(0, *m);
                    c.qubits.insert(0, controls[next_control]);
                }
            }
            ResolvedModifier::Inv => invert(&mut calls),
            ResolvedModifier::Pow(k) => {
                let k = k.as_int().ok_or_else(|| SemaError::TypeMismatch {
                    message: format!("pow exponent {k} is not an integer"),
                    span,
                })?;
                if k < 0 {
                    invert(&mut calls);
                }
                let reps = k.unsigned_abs() as usize;
                if calls.len().saturating_mul(reps) > MAX_STATEMENTS {
                    return Err(too_large());
                }
                calls = std::iter::repeat_n(calls, reps).flatten().collect();
            }
        }
    }
    Ok(calls)
}

fn invert(calls: &mut [ResolvedCall]) {
    calls.reverse();
    for c in calls {
        c.modifiers.insert(0, ResolvedModifier::Inv);
    }
}
